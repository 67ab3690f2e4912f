#include "eegpipe/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace eegpipe {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

// Real-input FFT returning bins 0..n/2. Power-of-two sizes go through a
// half-size complex FFT; other sizes fall back to a direct transform.
class RealFft {
 public:
  explicit RealFft(long n) : n_(n) {
    if (is_pow2(n_) && n_ >= 4) {
      const long m = n_ / 2;
      rev_.resize(m);
      long bits = 0;
      while ((1L << bits) < m) ++bits;
      for (long i = 0; i < m; ++i) {
        long r = 0;
        for (long b = 0; b < bits; ++b) {
          if (i & (1L << b)) r |= 1L << (bits - 1 - b);
        }
        rev_[i] = r;
      }
      twiddle_.resize(m / 2);
      for (long k = 0; k < m / 2; ++k) {
        twiddle_[k] = std::polar(1.0, -2.0 * kPi * k / m);
      }
      unpack_.resize(m + 1);
      for (long k = 0; k <= m; ++k) {
        unpack_[k] = std::polar(1.0, -2.0 * kPi * k / n_);
      }
      work_.resize(m);
    } else {
      roots_.resize(n_);
      for (long k = 0; k < n_; ++k) {
        roots_[k] = std::polar(1.0, -2.0 * kPi * k / n_);
      }
    }
  }

  long bins() const { return n_ / 2 + 1; }

  void compute(const double* x, cd* out) {
    if (!roots_.empty()) {
      direct(x, out);
      return;
    }
    const long m = n_ / 2;
    for (long i = 0; i < m; ++i) {
      work_[rev_[i]] = cd(x[2 * i], x[2 * i + 1]);
    }
    for (long len = 2; len <= m; len <<= 1) {
      const long step = m / len;
      for (long start = 0; start < m; start += len) {
        for (long k = 0; k < len / 2; ++k) {
          const cd w = twiddle_[k * step];
          const cd u = work_[start + k];
          const cd v = work_[start + k + len / 2] * w;
          work_[start + k] = u + v;
          work_[start + k + len / 2] = u - v;
        }
      }
    }
    // Z holds the FFT of even samples packed with odd samples; unpack.
    for (long k = 0; k <= m; ++k) {
      const cd zk = (k == m) ? work_[0] : work_[k];
      const cd zmk = std::conj(work_[(m - k) % m]);
      const cd fe = 0.5 * (zk + zmk);
      const cd fo = cd(0.0, -0.5) * (zk - zmk);
      out[k] = fe + unpack_[k] * fo;
    }
  }

 private:
  void direct(const double* x, cd* out) {
    for (long k = 0; k <= n_ / 2; ++k) {
      cd acc = 0.0;
      for (long j = 0; j < n_; ++j) {
        acc += x[j] * roots_[(k * j) % n_];
      }
      out[k] = acc;
    }
  }

  long n_;
  std::vector<long> rev_;
  std::vector<cd> twiddle_;
  std::vector<cd> unpack_;
  std::vector<cd> work_;
  std::vector<cd> roots_;  // non-empty selects the direct path
};

std::vector<double> hann_window(long n) {
  std::vector<double> w(n);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (long i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / (n - 1)));
  }
  return w;
}

// Shared frame loop for the spectrogram and the accumulated PSD.
void for_each_frame(const Eigen::VectorXd& x, int sample_rate, int window_len,
                    int hop,
                    const std::function<void(long, const double*)>& sink) {
  if (sample_rate <= 0) throw ParameterError("sample_rate must be positive");
  if (window_len < 2) throw ParameterError("window_len must be >= 2");
  if (hop < 1) throw ParameterError("hop must be >= 1");
  if (x.size() < window_len) {
    throw ParameterError("series of " + std::to_string(x.size()) +
                         " samples is shorter than the " +
                         std::to_string(window_len) + "-sample window");
  }

  const long n_frames = (x.size() - window_len) / hop + 1;
  const long bins = window_len / 2 + 1;
  const std::vector<double> w = hann_window(window_len);
  double wsum2 = 0.0;
  for (double v : w) wsum2 += v * v;

  RealFft fft(window_len);
  std::vector<double> frame(window_len);
  std::vector<cd> spectrum(bins);
  std::vector<double> power(bins);

  const double base_scale = 1.0 / (window_len * wsum2);
  for (long f = 0; f < n_frames; ++f) {
    const double* src = x.data() + f * hop;
    for (long i = 0; i < window_len; ++i) frame[i] = src[i] * w[i];
    fft.compute(frame.data(), spectrum.data());
    for (long k = 0; k < bins; ++k) {
      const bool edge = (k == 0) || (k == bins - 1 && window_len % 2 == 0);
      power[k] = (edge ? 1.0 : 2.0) * std::norm(spectrum[k]) * base_scale;
    }
    sink(f, power.data());
  }
}

}  // namespace

Spectrogram stft_spectrogram(const Eigen::VectorXd& series, int sample_rate,
                             int window_len, int hop) {
  Spectrogram out;
  out.window_len = window_len;
  out.hop = hop;
  out.sample_rate = sample_rate;

  const long n_frames = (series.size() - window_len) / hop + 1;
  const long bins = window_len / 2 + 1;
  out.values.resize(std::max(n_frames, 0L), bins);
  for_each_frame(series, sample_rate, window_len, hop,
                 [&](long f, const double* power) {
                   for (long k = 0; k < bins; ++k) out.values(f, k) = power[k];
                 });

  out.freq_axis.resize(bins);
  for (long k = 0; k < bins; ++k) {
    out.freq_axis[k] = static_cast<double>(k) * sample_rate / window_len;
  }
  out.time_axis.resize(n_frames);
  for (long f = 0; f < n_frames; ++f) {
    out.time_axis[f] = (f * static_cast<double>(hop) + (window_len - 1) / 2.0) /
                       sample_rate;
  }
  return out;
}

PsdCurve psd_from_spectrogram(const Spectrogram& spec) {
  if (spec.values.rows() < 1) throw ParameterError("spectrogram has no frames");
  const double df = static_cast<double>(spec.sample_rate) / spec.window_len;
  PsdCurve psd;
  psd.freq = spec.freq_axis;
  psd.power.resize(spec.values.cols());
  const Eigen::VectorXd mean = spec.values.colwise().mean();
  for (long k = 0; k < mean.size(); ++k) psd.power[k] = mean(k) / df;
  return psd;
}

PsdCurve channel_psd(const Eigen::VectorXd& series, int sample_rate,
                     int window_len, int hop) {
  const long bins = window_len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  long frames = 0;
  for_each_frame(series, sample_rate, window_len, hop,
                 [&](long, const double* power) {
                   for (long k = 0; k < bins; ++k) acc[k] += power[k];
                   ++frames;
                 });

  const double df = static_cast<double>(sample_rate) / window_len;
  PsdCurve psd;
  psd.freq.resize(bins);
  psd.power.resize(bins);
  for (long k = 0; k < bins; ++k) {
    psd.freq[k] = static_cast<double>(k) * sample_rate / window_len;
    psd.power[k] = acc[k] / frames / df;
  }
  return psd;
}

double band_power(const PsdCurve& psd, double f_lo, double f_hi) {
  const std::size_t n = psd.freq.size();
  if (n < 2) throw ParameterError("psd needs at least two bins");
  if (!(f_lo < f_hi)) throw ParameterError("band edges must satisfy f_lo < f_hi");
  const double lo_limit = psd.freq.front();
  const double hi_limit = psd.freq.back();
  if (f_lo < lo_limit - 1e-9 || f_hi > hi_limit + 1e-9) {
    throw ParameterError("band " + std::to_string(f_lo) + "-" +
                         std::to_string(f_hi) + " Hz outside psd range " +
                         std::to_string(lo_limit) + "-" +
                         std::to_string(hi_limit) + " Hz");
  }
  f_lo = std::max(f_lo, lo_limit);
  f_hi = std::min(f_hi, hi_limit);

  const double f0 = psd.freq.front();
  const double df = psd.freq[1] - psd.freq[0];
  auto value_at = [&](double f) {
    double t = (f - f0) / df;
    long j = static_cast<long>(std::floor(t));
    j = std::clamp(j, 0L, static_cast<long>(n) - 2);
    const double u = t - j;
    return psd.power[j] * (1.0 - u) + psd.power[j + 1] * u;
  };

  // Trapezoids between consecutive breakpoints: the band edges plus every
  // interior bin boundary.
  double total = 0.0;
  double a = f_lo;
  double pa = value_at(a);
  long j = static_cast<long>(std::floor((f_lo - f0) / df)) + 1;
  for (; j < static_cast<long>(n); ++j) {
    const double edge = f0 + j * df;
    if (edge >= f_hi) break;
    if (edge <= a) continue;
    const double pe = psd.power[j];
    total += 0.5 * (pa + pe) * (edge - a);
    a = edge;
    pa = pe;
  }
  const double pb = value_at(f_hi);
  total += 0.5 * (pa + pb) * (f_hi - a);
  return total;
}

double band_power(const PsdCurve& psd, const BandDef& band) {
  return band_power(psd, band.f_lo, band.f_hi);
}

std::array<double, 5> normalized_band_powers(const PsdCurve& psd) {
  const double total = band_power(psd, kTotalPowerLoHz, kTotalPowerHiHz);
  if (!(total > 0.0)) {
    throw DataError("total 1-49 Hz power is zero; cannot normalize");
  }
  std::array<double, 5> out{};
  for (const BandDef& band : canonical_bands()) {
    out[static_cast<std::size_t>(band.name)] =
        100.0 * band_power(psd, band) / total;
  }
  return out;
}

BandPowerMatrix band_power_matrix(const StageSegment& seg,
                                  const std::vector<std::string>& channels,
                                  const std::string& label, int window_len,
                                  int hop) {
  if (static_cast<long>(channels.size()) != seg.samples.rows()) {
    throw DataError("channel list does not match segment rows");
  }
  BandPowerMatrix m;
  m.channels = channels;
  m.label = label;
  m.values.resize(seg.samples.rows(), 5);
  for (long ch = 0; ch < seg.samples.rows(); ++ch) {
    const Eigen::VectorXd row = seg.samples.row(ch).transpose();
    const PsdCurve psd = channel_psd(row, seg.sample_rate, window_len, hop);
    const std::array<double, 5> pct = normalized_band_powers(psd);
    for (int b = 0; b < 5; ++b) m.values(ch, b) = pct[b];
  }
  return m;
}

BandDiffMatrix band_difference_matrix(const BandPowerMatrix& a,
                                      const BandPowerMatrix& b) {
  if (a.values.rows() != b.values.rows() ||
      a.values.cols() != b.values.cols()) {
    throw DataError("band-power matrices have different shapes");
  }
  if (a.channels != b.channels) {
    throw DataError("band-power matrices have different channel labels");
  }
  BandDiffMatrix d;
  d.values = a.values - b.values;
  d.channels = a.channels;
  d.label = a.label + "-" + b.label;
  return d;
}

std::vector<Band> DominantBandReport::selected() const {
  std::vector<Band> out;
  for (const auto& entry : bands) {
    if (entry.dominant) out.push_back(entry.band);
  }
  return out;
}

DominantBandReport select_dominant_bands(
    const std::vector<BandDiffMatrix>& per_participant, double threshold,
    int min_channels, AggregationRule rule) {
  if (per_participant.empty()) {
    throw ParameterError("band selection needs at least one difference matrix");
  }
  const auto& first = per_participant.front();
  for (const auto& m : per_participant) {
    if (m.values.rows() != first.values.rows() ||
        m.values.cols() != first.values.cols() ||
        m.channels != first.channels) {
      throw DataError("difference matrices disagree in shape or channels");
    }
  }
  const long n_ch = first.values.rows();
  const long n_bands = first.values.cols();
  const double participants = static_cast<double>(per_participant.size());

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n_ch, n_bands);
  for (const auto& m : per_participant) mean += m.values;
  mean /= participants;

  DominantBandReport report;
  report.threshold = threshold;
  report.min_channels = min_channels;
  for (long b = 0; b < n_bands; ++b) {
    BandReportEntry entry;
    entry.band = static_cast<Band>(b);
    for (long ch = 0; ch < n_ch; ++ch) {
      bool meaningful = false;
      if (rule == AggregationRule::MeanThenThreshold) {
        meaningful = std::abs(mean(ch, b)) > threshold;
      } else {
        long votes = 0;
        for (const auto& m : per_participant) {
          if (std::abs(m.values(ch, b)) > threshold) ++votes;
        }
        meaningful = votes * 2 > static_cast<long>(per_participant.size());
      }
      if (meaningful) {
        entry.meaningful.push_back({first.channels[ch], mean(ch, b)});
      }
    }
    entry.dominant =
        static_cast<int>(entry.meaningful.size()) >= min_channels;
    report.bands.push_back(std::move(entry));
  }
  return report;
}

}  // namespace eegpipe
