#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eegpipe/classify.hpp"
#include "eegpipe/features.hpp"
#include "eegpipe/ingest.hpp"
#include "eegpipe/preprocess.hpp"
#include "eegpipe/spectral.hpp"

namespace eegpipe {

// One participant's pair of session directories.
struct SubjectPaths {
  std::string subject_id;
  std::filesystem::path two_d_manifest;
  std::filesystem::path three_d_manifest;
};

struct SubjectData {
  std::string subject_id;
  Recording two_d;
  Recording three_d;
};

// Scans root/<subject>/{2d,3d}/manifest.json, sorted by subject name.
std::vector<SubjectPaths> discover_subjects(const std::filesystem::path& root);
SubjectData load_subject(const SubjectPaths& paths);

struct BandSelectConfig {
  ComparisonStage stage = ComparisonStage::III;
  double threshold = 2.0;
  int min_channels = 3;
  AggregationRule rule = AggregationRule::MeanThenThreshold;
  int window_len = 512;
  int decimation = 1;  // spectrogram hop
  PreprocessOptions preprocess;
};

struct BandSelectResult {
  ComparisonStage stage = ComparisonStage::III;
  DominantBandReport report;
  std::vector<std::string> subject_ids;
  std::vector<BandDiffMatrix> per_subject;
  BandDiffMatrix average;
};

// Per-subject difference matrices for the comparison stage, then the
// dominant-band rule across subjects.
BandSelectResult run_band_selection(const std::vector<SubjectData>& subjects,
                                    const BandSelectConfig& cfg);

struct ClassifyConfig {
  FeatureKind feature = FeatureKind::Dwt;
  ClassifierKind classifier = ClassifierKind::Svm;
  std::vector<BandDef> dominant_bands;  // empty selects {delta, alpha}
  std::uint64_t seed = 0;
  int k_fold = 10;
  HyperGrid grid;
  SearchStrategy strategy = SearchStrategy::RankedPrefix;
  int exhaustive_k = 2;
  int max_prefix = 0;
  int stft_window = 512;
  int decimation = 1;  // STFT feature hop
  bool chronological_split = false;
};

struct SubjectClassifyOutcome {
  std::string subject_id;
  ChannelSearchResult search;
};

struct ClassifyRunResult {
  FeatureKind feature = FeatureKind::Dwt;
  ClassifierKind classifier = ClassifierKind::Svm;
  std::vector<SubjectClassifyOutcome> subjects;
  std::vector<std::string> channels;
  std::vector<double> mean_channel_accuracy;  // montage order
  double mean_best_accuracy = 0.0;
};

ClassifyRunResult run_classification(const std::vector<SubjectData>& subjects,
                                     const ClassifyConfig& cfg);

FeatureDataset assemble_subject_dataset(const SubjectData& subject,
                                        const ClassifyConfig& cfg);

// Serialization used by the CLI reports (stable key order, no timestamps).
std::string band_select_to_json(const BandSelectResult& result);
std::string classify_to_json(const ClassifyRunResult& result);
void write_diff_matrix_csv(const BandDiffMatrix& m,
                           const std::filesystem::path& path);

}  // namespace eegpipe
