#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

#include "eegpipe/core.hpp"
#include "eegpipe/spectral.hpp"
#include "eegpipe/wavelet.hpp"

namespace eegpipe {

// A fixed-length windowed slice of a stage segment.
struct Epoch {
  Eigen::MatrixXd samples;  // channels x window samples
  int trial_index = 0;
  double offset_s = 0.0;
  Condition label = Condition::TwoD;
  int sample_rate = 512;
};

// Sliding-window segmentation: offsets 0, step, 2*step, ... while a full
// window fits. A 9 s segment at the 4 s / 0.5 s defaults yields 11 epochs.
std::vector<Epoch> epoch_segment(const StageSegment& seg, double win_s = 4.0,
                                 double step_s = 0.5);

enum class FeatureKind { Stft, Dwt };

std::string to_string(FeatureKind k);
FeatureKind feature_kind_from_string(const std::string& s);

struct StftFeatureOptions {
  int window_len = 512;  // shortened to the epoch length when necessary
  int hop = 1;
};

// Per-channel normalized power of the dominant bands: channels x |bands|.
Eigen::MatrixXd stft_features(const Epoch& epoch,
                              const std::vector<BandDef>& dominant_bands,
                              const StftFeatureOptions& opts = {});

// Table-2 pairing of canonical bands with DWT sub-bands of a 7-level db1
// decomposition at 512 Hz (delta -> A7, theta -> D7, alpha -> D6, ...).
Subband default_subband_for_band(Band b);

// Per-channel [min, max, mean, population SD] over the concatenated
// coefficients of the selected sub-bands: channels x 4.
Eigen::MatrixXd dwt_features(const Epoch& epoch,
                             const std::vector<Subband>& selection,
                             const WaveletSpec& spec = {1, 7});

// Labeled per-channel feature matrices with a frozen train/test partition.
struct FeatureDataset {
  FeatureKind kind = FeatureKind::Dwt;
  std::vector<std::string> channels;
  std::vector<Eigen::MatrixXd> per_channel;  // [channel]: epochs x dim
  std::vector<Condition> labels;
  std::vector<int> trial_indices;
  std::vector<double> offsets_s;
  std::vector<long> train_idx;
  std::vector<long> test_idx;

  long epoch_count() const { return static_cast<long>(labels.size()); }
  long feature_dim() const {
    return per_channel.empty() ? 0 : per_channel.front().cols();
  }
};

struct AssembleOptions {
  FeatureKind kind = FeatureKind::Dwt;
  std::vector<BandDef> dominant_bands;  // empty selects {delta, alpha}
  std::uint64_t seed = 0;
  bool chronological = false;  // split by epoch order instead of shuffling
  double epoch_s = 4.0;
  double step_s = 0.5;
  StftFeatureOptions stft;
  WaveletSpec wavelet{1, 7};
  double bandpass_lo_hz = 1.0;
  double bandpass_hi_hz = 35.0;
  int bandpass_order = 3;
};

// Rest-stage epochs of both conditions, features of the chosen kind, and a
// deterministic stratified split (83 train / 82 test per class at the
// 15-trial scale; ceil/floor halves in general). The first recording defines
// the positive (2D) class.
FeatureDataset assemble_dataset(const Recording& rec_2d,
                                const Recording& rec_3d,
                                const AssembleOptions& opts = {});

// One row per (epoch, channel): epoch, channel, features..., label, split.
void write_dataset_csv(const FeatureDataset& ds,
                       const std::filesystem::path& path);

}  // namespace eegpipe
