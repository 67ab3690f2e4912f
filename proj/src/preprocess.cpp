#include "eegpipe/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "eegpipe/ingest.hpp"

namespace eegpipe {

namespace {

using cd = std::complex<double>;

// Polynomial coefficients (highest order first) from roots.
std::vector<cd> poly_from_roots(const std::vector<cd>& roots) {
  std::vector<cd> coeffs{1.0};
  for (const cd& r : roots) {
    std::vector<cd> next(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i] += coeffs[i];
      next[i + 1] -= coeffs[i] * r;
    }
    coeffs = std::move(next);
  }
  return coeffs;
}

std::vector<double> real_coeffs(const std::vector<cd>& c) {
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

// Steady-state state vector of the direct-form-II-transposed filter for a
// unit step input, used to suppress start-up transients.
std::vector<double> lfilter_zi(const IirFilter& f) {
  const long m = static_cast<long>(std::max(f.a.size(), f.b.size())) - 1;
  std::vector<double> a(f.a), b(f.b);
  a.resize(m + 1, 0.0);
  b.resize(m + 1, 0.0);

  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(m, m);
  // I - companion(a)^T: companion has -a[1:] in its first row and ones on
  // the subdiagonal.
  for (long i = 0; i < m; ++i) {
    sys(i, 0) += a[i + 1];
    if (i + 1 < m) sys(i, i + 1) -= 1.0;
  }
  Eigen::VectorXd rhs(m);
  for (long i = 0; i < m; ++i) rhs(i) = b[i + 1] - a[i + 1] * b[0];

  Eigen::VectorXd zi = sys.colPivHouseholderQr().solve(rhs);
  return {zi.data(), zi.data() + m};
}

Eigen::VectorXd run_lfilter(const IirFilter& f, const Eigen::VectorXd& x,
                            std::vector<double> state) {
  const long m = static_cast<long>(std::max(f.a.size(), f.b.size())) - 1;
  std::vector<double> a(f.a), b(f.b);
  a.resize(m + 1, 0.0);
  b.resize(m + 1, 0.0);
  state.resize(m, 0.0);

  Eigen::VectorXd y(x.size());
  for (long i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    const double yi = b[0] * xi + state[0];
    for (long j = 0; j + 1 < m; ++j) {
      state[j] = b[j + 1] * xi + state[j + 1] - a[j + 1] * yi;
    }
    state[m - 1] = b[m] * xi - a[m] * yi;
    y(i) = yi;
  }
  return y;
}

}  // namespace

IirFilter butter_bandpass_coeffs(int order, double f_lo, double f_hi,
                                 int sample_rate) {
  if (order < 1) throw ParameterError("filter order must be >= 1");
  if (sample_rate <= 0) throw ParameterError("sample_rate must be positive");
  const double nyquist = sample_rate / 2.0;
  if (!(0.0 < f_lo && f_lo < f_hi && f_hi < nyquist)) {
    throw ParameterError("bandpass edges must satisfy 0 < " +
                         std::to_string(f_lo) + " < " + std::to_string(f_hi) +
                         " < Nyquist (" + std::to_string(nyquist) + " Hz)");
  }

  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * sample_rate;

  // Pre-warped band edges (rad/s).
  const double w1 = fs2 * std::tan(pi * f_lo / sample_rate);
  const double w2 = fs2 * std::tan(pi * f_hi / sample_rate);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  // Analog lowpass prototype poles on the unit circle, left half-plane.
  std::vector<cd> proto;
  for (int k = 0; k < order; ++k) {
    const double theta = pi * (2.0 * k + order + 1.0) / (2.0 * order);
    proto.emplace_back(std::cos(theta), std::sin(theta));
  }

  // Lowpass -> bandpass: each pole splits into a conjugate-product pair.
  std::vector<cd> poles;
  for (const cd& p : proto) {
    const cd s = p * (bw / 2.0);
    const cd disc = std::sqrt(s * s - w0 * w0);
    poles.push_back(s + disc);
    poles.push_back(s - disc);
  }
  // n analog zeros at s = 0; gain bw^order.
  double gain = std::pow(bw, order);

  // Bilinear transform z = (fs2 + s) / (fs2 - s).
  std::vector<cd> zpoles, zzeros;
  cd gain_num = 1.0, gain_den = 1.0;
  for (const cd& p : poles) {
    zpoles.push_back((fs2 + p) / (fs2 - p));
    gain_den *= (fs2 - p);
  }
  for (int k = 0; k < order; ++k) {
    zzeros.push_back(1.0);   // from the analog zeros at s = 0
    zzeros.push_back(-1.0);  // degree completion (zeros at infinity)
    gain_num *= fs2;         // fs2 - 0
  }
  gain *= (gain_num / gain_den).real();

  IirFilter f;
  f.a = real_coeffs(poly_from_roots(zpoles));
  f.b = real_coeffs(poly_from_roots(zzeros));
  for (double& v : f.b) v *= gain;
  return f;
}

IirFilter notch_coeffs(double f0, double quality, int sample_rate) {
  if (sample_rate <= 0) throw ParameterError("sample_rate must be positive");
  if (quality <= 0) throw ParameterError("notch quality must be positive");
  if (!(0.0 < f0 && f0 < sample_rate / 2.0)) {
    throw ParameterError("notch frequency " + std::to_string(f0) +
                         " Hz must lie below Nyquist (" +
                         std::to_string(sample_rate / 2.0) + " Hz)");
  }
  const double w0 = 2.0 * std::numbers::pi * f0 / sample_rate;
  const double beta = std::tan(w0 / (2.0 * quality));
  const double gain = 1.0 / (1.0 + beta);
  IirFilter f;
  f.b = {gain, -2.0 * gain * std::cos(w0), gain};
  f.a = {1.0, -2.0 * gain * std::cos(w0), 2.0 * gain - 1.0};
  return f;
}

Eigen::VectorXd lfilter(const IirFilter& f, const Eigen::VectorXd& x,
                        const std::vector<double>* zi) {
  return run_lfilter(f, x, zi ? *zi : std::vector<double>{});
}

Eigen::VectorXd filtfilt(const IirFilter& f, const Eigen::VectorXd& x) {
  const long n = x.size();
  if (n == 0) return x;
  const long order = static_cast<long>(std::max(f.a.size(), f.b.size())) - 1;
  const long padlen = std::min(3 * order, n - 1);

  // Odd reflection about both end samples.
  Eigen::VectorXd ext(n + 2 * padlen);
  for (long i = 0; i < padlen; ++i) {
    ext(i) = 2.0 * x(0) - x(padlen - i);
    ext(n + padlen + i) = 2.0 * x(n - 1) - x(n - 2 - i);
  }
  ext.segment(padlen, n) = x;

  const std::vector<double> zi = lfilter_zi(f);
  auto scaled = [&](double x0) {
    std::vector<double> s(zi);
    for (double& v : s) v *= x0;
    return s;
  };

  Eigen::VectorXd y = run_lfilter(f, ext, scaled(ext(0)));
  y.reverseInPlace();
  y = run_lfilter(f, y, scaled(y(0)));
  y.reverseInPlace();
  return y.segment(padlen, n);
}

Eigen::VectorXd notch_50(const Eigen::VectorXd& x, int sample_rate,
                         double quality) {
  if (sample_rate <= 100) {
    throw ParameterError("sample_rate of " + std::to_string(sample_rate) +
                         " Hz is too low for a 50 Hz notch");
  }
  return filtfilt(notch_coeffs(50.0, quality, sample_rate), x);
}

Eigen::VectorXd butter_bandpass_zero_phase(const Eigen::VectorXd& x,
                                           double f_lo, double f_hi, int order,
                                           int sample_rate) {
  return filtfilt(butter_bandpass_coeffs(order, f_lo, f_hi, sample_rate), x);
}

Trial average_trials(const std::vector<Trial>& trials) {
  if (trials.empty()) throw ParameterError("average_trials needs >= 1 trial");
  const long rows = trials.front().samples.rows();
  const long cols = trials.front().samples.cols();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    if (t.samples.rows() != rows || t.samples.cols() != cols) {
      throw DataError("trial " + std::to_string(i) + " shape " +
                      std::to_string(t.samples.rows()) + "x" +
                      std::to_string(t.samples.cols()) +
                      " differs from trial 0 (" + std::to_string(rows) + "x" +
                      std::to_string(cols) + ")");
    }
    acc += t.samples;
  }
  Trial out;
  out.samples = acc / static_cast<double>(trials.size());
  out.paradigm = trials.front().paradigm;
  return out;
}

Trial preprocess_for_band_selection(const Recording& rec,
                                    const PreprocessOptions& opts) {
  ValidationReport report = validate(rec, opts.artifact_threshold_uv);
  if (!report.ok()) {
    throw DataError("recording fails validation: " + report.errors.front());
  }
  if (rec.trials.empty()) throw DataError("recording has no trials");

  std::vector<Trial> kept;
  if (opts.reject_artifact_fraction) {
    const double limit = *opts.reject_artifact_fraction;
    for (std::size_t i = 0; i < rec.trials.size(); ++i) {
      const auto& t = rec.trials[i];
      const double frac = static_cast<double>(report.artifact_counts[i]) /
                          static_cast<double>(t.samples.size());
      if (frac <= limit) kept.push_back(t);
    }
    if (kept.empty()) {
      throw DataError("all trials exceed the artifact rejection fraction");
    }
  } else {
    kept = rec.trials;
  }

  if (opts.notch_before_average) {
    for (Trial& t : kept) {
      for (long ch = 0; ch < t.samples.rows(); ++ch) {
        Eigen::VectorXd row = t.samples.row(ch).transpose();
        t.samples.row(ch) = notch_50(row, rec.sample_rate, opts.notch_q).transpose();
      }
    }
  }

  Trial avg = average_trials(kept);
  for (long ch = 0; ch < avg.samples.rows(); ++ch) {
    Eigen::VectorXd row = avg.samples.row(ch).transpose();
    if (!opts.notch_before_average) row = notch_50(row, rec.sample_rate, opts.notch_q);
    row = butter_bandpass_zero_phase(row, opts.bandpass_lo_hz,
                                     opts.bandpass_hi_hz, opts.bandpass_order,
                                     rec.sample_rate);
    avg.samples.row(ch) = row.transpose();
  }
  return avg;
}

StageSegment preprocess_for_classification(const StageSegment& seg,
                                           double f_lo, double f_hi,
                                           int order) {
  StageSegment out = seg;
  for (long ch = 0; ch < out.samples.rows(); ++ch) {
    Eigen::VectorXd row = out.samples.row(ch).transpose();
    row = notch_50(row, seg.sample_rate);
    row = butter_bandpass_zero_phase(row, f_lo, f_hi, order, seg.sample_rate);
    out.samples.row(ch) = row.transpose();
  }
  return out;
}

}  // namespace eegpipe
