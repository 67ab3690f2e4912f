#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "eegpipe/core.hpp"

namespace eegpipe {

// One-sided STFT power spectrogram. values(frame, bin) holds the squared
// magnitude normalized by window energy, in uV^2 per bin, with the usual
// one-sided doubling of interior bins: summing a frame's bins over a spectral
// peak recovers the signal power there (a unit sinusoid integrates to ~0.5).
struct Spectrogram {
  Eigen::MatrixXd values;
  std::vector<double> freq_axis;  // Hz, bin centers; resolution fs/window_len
  std::vector<double> time_axis;  // s, frame centers
  int window_len = 0;
  int hop = 1;
  int sample_rate = 0;
};

// Power spectral density over [0, Nyquist], uV^2/Hz, uniform bin spacing.
struct PsdCurve {
  std::vector<double> freq;
  std::vector<double> power;
};

// Hanning-windowed spectrogram; hop 1 reproduces the maximum-overlap
// configuration, larger hops decimate frames for speed.
Spectrogram stft_spectrogram(const Eigen::VectorXd& series, int sample_rate,
                             int window_len = 512, int hop = 1);

// Time-average of spectrogram frames scaled to power density.
PsdCurve psd_from_spectrogram(const Spectrogram& spec);

// Same result as psd_from_spectrogram(stft_spectrogram(...)) without storing
// the full frame grid.
PsdCurve channel_psd(const Eigen::VectorXd& series, int sample_rate,
                     int window_len = 512, int hop = 1);

// Trapezoidal integral of the PSD over [f_lo, f_hi]; band edges between bins
// are handled by linear interpolation.
double band_power(const PsdCurve& psd, const BandDef& band);
double band_power(const PsdCurve& psd, double f_lo, double f_hi);

// Percentage of total 1-49 Hz power in each canonical band, in Band order.
std::array<double, 5> normalized_band_powers(const PsdCurve& psd);

// channels x 5 normalized power percentages for one condition/stage.
struct BandPowerMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> channels;
  std::string label;
};

// Signed element-wise difference of two band-power matrices.
struct BandDiffMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> channels;
  std::string label;
};

// Per-channel normalized band powers of a stage segment.
BandPowerMatrix band_power_matrix(const StageSegment& seg,
                                  const std::vector<std::string>& channels,
                                  const std::string& label,
                                  int window_len = 512, int hop = 1);

BandDiffMatrix band_difference_matrix(const BandPowerMatrix& a,
                                      const BandPowerMatrix& b);

struct MeaningfulChannel {
  std::string channel;
  double difference = 0.0;  // averaged signed difference, percentage points
};

struct BandReportEntry {
  Band band = Band::Delta;
  bool dominant = false;
  std::vector<MeaningfulChannel> meaningful;
};

struct DominantBandReport {
  std::vector<BandReportEntry> bands;  // all five, canonical order
  double threshold = 2.0;
  int min_channels = 3;

  std::vector<Band> selected() const;
};

// How per-participant difference matrices are combined before thresholding.
enum class AggregationRule {
  MeanThenThreshold,      // average matrices, then apply the threshold
  PerParticipantMajority  // a cell counts when it passes in > half of them
};

// A (channel, band) cell is meaningful when its aggregated |difference|
// exceeds the threshold; a band is dominant when at least min_channels
// channels are meaningful.
DominantBandReport select_dominant_bands(
    const std::vector<BandDiffMatrix>& per_participant, double threshold = 2.0,
    int min_channels = 3,
    AggregationRule rule = AggregationRule::MeanThenThreshold);

}  // namespace eegpipe
