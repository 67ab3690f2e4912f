#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eegpipe/core.hpp"

namespace eegpipe {

// On-disk session description. The manifest is a JSON file; each trial is a
// CSV file (header row of channel labels, one column per channel, one row per
// sample, values in microvolts). trial_files are relative to the manifest.
struct SessionManifest {
  std::string subject_id;
  Condition condition = Condition::TwoD;
  int sample_rate = 512;
  ParadigmSpec paradigm;
  std::vector<std::string> channel_order;
  std::vector<std::string> trial_files;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  std::vector<long> artifact_counts;  // per trial: samples over the threshold

  bool ok() const { return errors.empty(); }
  long total_artifacts() const;
};

SessionManifest read_manifest(const std::filesystem::path& manifest_path);

// Loads and validates a session. Channel rows are reordered to the standard
// montage order when the manifest lists a permutation of it.
Recording load_recording(const std::filesystem::path& manifest_path);

// Writes manifest.json plus one trial CSV per trial into dir. Sample values
// round-trip bit-exactly through load_recording.
SessionManifest save_recording(const Recording& rec,
                               const std::filesystem::path& dir);

// Structural checks plus per-trial artifact counts (|amplitude| > threshold).
ValidationReport validate(const Recording& rec,
                          double artifact_threshold_uv = 100.0);

}  // namespace eegpipe
