#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "eegpipe/core.hpp"

namespace eegpipe {

// Digital IIR filter in transfer-function form; a[0] is always 1.
struct IirFilter {
  std::vector<double> b;
  std::vector<double> a;
};

enum class FilterKind { Bandpass, Notch };

struct FilterSpec {
  FilterKind kind = FilterKind::Bandpass;
  int order = 3;          // bandpass only
  double f_lo = 1.0;      // bandpass edges, Hz
  double f_hi = 55.0;
  double f0 = 50.0;       // notch center, Hz
  double quality = 35.0;  // notch Q
  bool zero_phase = true;
};

// Butterworth bandpass via bilinear transform with pre-warped edges.
IirFilter butter_bandpass_coeffs(int order, double f_lo, double f_hi,
                                 int sample_rate);

// Second-order notch with an exact null at f0.
IirFilter notch_coeffs(double f0, double quality, int sample_rate);

// Forward-backward filtering (zero net phase, squared magnitude response).
// Edges are extended by odd reflection of 3x the filter order and the run-in
// uses the filter's unit-step steady state.
Eigen::VectorXd filtfilt(const IirFilter& f, const Eigen::VectorXd& x);

// Single-pass causal filtering with optional initial state.
Eigen::VectorXd lfilter(const IirFilter& f, const Eigen::VectorXd& x,
                        const std::vector<double>* zi = nullptr);

Eigen::VectorXd notch_50(const Eigen::VectorXd& x, int sample_rate,
                         double quality = 35.0);

Eigen::VectorXd butter_bandpass_zero_phase(const Eigen::VectorXd& x,
                                           double f_lo, double f_hi, int order,
                                           int sample_rate);

// Element-wise mean across trials of identical shape.
Trial average_trials(const std::vector<Trial>& trials);

struct PreprocessOptions {
  double artifact_threshold_uv = 100.0;
  // Drop trials whose artifact-sample fraction exceeds this; unset keeps all
  // trials and relies on averaging (the default policy).
  std::optional<double> reject_artifact_fraction;
  bool notch_before_average = false;
  double bandpass_lo_hz = 1.0;
  double bandpass_hi_hz = 55.0;
  int bandpass_order = 3;
  double notch_hz = 50.0;
  double notch_q = 35.0;
};

// Band-selection front end: artifact screen, trial average, 50 Hz notch,
// then 1-55 Hz zero-phase bandpass per channel.
Trial preprocess_for_band_selection(const Recording& rec,
                                    const PreprocessOptions& opts = {});

// Classification front end for a single stage segment: 50 Hz notch then
// 1-35 Hz zero-phase bandpass per channel. No trial averaging.
StageSegment preprocess_for_classification(const StageSegment& seg,
                                           double f_lo = 1.0, double f_hi = 35.0,
                                           int order = 3);

}  // namespace eegpipe
