#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "eegpipe/core.hpp"

namespace eegpipe {

struct SpikeEvent {
  int trial = 0;
  std::string channel;
  double time_s = 0.0;
  double amplitude_uv = 0.0;
};

// Ground-truth generator parameters. Oscillator frequencies and phases are
// derived from the seed per (channel, band, oscillator) and are shared across
// trials, stages and conditions, so that trial averaging keeps the band
// content intact while independent noise averages down; only the noise and
// spike streams depend on trial and condition.
struct SynthSpec {
  std::string subject_id = "synthetic";
  Condition condition = Condition::TwoD;
  int sample_rate = 512;
  std::uint64_t seed = 0;

  double noise_rms_uv = 0.0;   // pink noise RMS per channel
  double line50_amp_uv = 0.0;  // 50 Hz tone amplitude
  int oscillators_per_band = 5;
  // Oscillator frequencies are drawn uniformly from the central part of each
  // band; the guard keeps spectral leakage inside the band at the 1 Hz
  // resolution of the analysis window.
  double band_guard_fraction = 0.25;

  // Per-stage RMS envelopes, each channels x 5 bands (uV).
  std::array<Eigen::MatrixXd, 3> stage_rms;

  std::vector<SpikeEvent> spikes;

  void init_envelopes(std::size_t n_channels);
  // channel "*" applies to every channel.
  void set_rms(Stage stage, const std::string& channel, Band band,
               double rms_uv, const Montage& montage);
  double get_rms(Stage stage, int channel, Band band) const;
};

std::string synth_spec_to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const std::string& text, const Montage& montage);

Recording generate_recording(const SynthSpec& spec,
                             const ParadigmSpec& paradigm,
                             const Montage& montage);

struct Stage3PairOptions {
  double verify_tolerance_pts = 0.5;
  int max_calibration_iters = 6;
  int psd_hop = 8;  // frame decimation used by the calibration measurements
  int window_len = 512;
};

// A 2D/3D recording pair whose Rest stages differ by the requested
// normalized-power shifts (2D minus 3D, percentage points) on the listed
// channels. RMS envelopes of the 3D spec are solved against the measured 2D
// matrix and verified through the band-selection pipeline.
std::pair<Recording, Recording> make_stage3_pair(
    const SynthSpec& base, double delta_shift_pts, double alpha_shift_pts,
    const std::vector<std::string>& channels, const ParadigmSpec& paradigm,
    const Montage& montage, const Stage3PairOptions& opts = {});

// Named generator presets shipped with the CLI.
std::vector<std::string> synth_preset_names();

struct SessionPair {
  Recording two_d;
  Recording three_d;
};

// Channels carrying the injected Stage III shifts in stage3-paper-like.
const std::vector<std::string>& stage3_injected_channels();

SessionPair generate_preset_pair(const std::string& preset, std::uint64_t seed,
                                 const std::string& subject_id,
                                 const ParadigmSpec& paradigm = {},
                                 const Montage& montage = standard_montage());

}  // namespace eegpipe
