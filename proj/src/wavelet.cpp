#include "eegpipe/wavelet.hpp"

#include <cmath>
#include <string>

namespace eegpipe {

namespace {

// Orthonormal Daubechies scaling filters (sum = sqrt(2), energy = 1).
const std::vector<std::vector<double>> kDaubechiesFilters = {
    // db1 (Haar)
    {0.7071067811865476, 0.7071067811865476},
    // db2
    {0.4829629131445341, 0.8365163037378079, 0.2241438680420134,
     -0.1294095225512604},
    // db3
    {0.3326705529500825, 0.8068915093110924, 0.4598775021184914,
     -0.1350110200102546, -0.0854412738820267, 0.0352262918857095},
    // db4
    {0.2303778133088964, 0.7148465705529154, 0.6308807679298587,
     -0.0279837694168599, -0.1870348117190931, 0.0308413818355607,
     0.0328830116668852, -0.0105974017850690},
    // db5
    {0.1601023979741929, 0.6038292697971895, 0.7243085284377726,
     0.1384281459013203, -0.2422948870663823, -0.0322448695846381,
     0.0775714938400459, -0.0062414902127983, -0.0125807519990820,
     0.0033357252854738},
    // db6
    {0.1115407433501095, 0.4946238903984533, 0.7511339080210959,
     0.3152503517091982, -0.2262646939654400, -0.1297668675672625,
     0.0975016055873225, 0.0275228655303053, -0.0315820393174862,
     0.0005538422011614, 0.0047772575109455, -0.0010773010853085},
    // db7
    {0.0778520540850037, 0.3965393194818912, 0.7291320908462351,
     0.4697822874051889, -0.1439060039285212, -0.2240361849938412,
     0.0713092192668272, 0.0806126091510774, -0.0380299369350104,
     -0.0165745416306655, 0.0125509985560986, 0.0004295779729214,
     -0.0018016407040473, 0.0003537137999745},
    // db8
    {0.0544158422431072, 0.3128715909143166, 0.6756307362973195,
     0.5853546836548691, -0.0158291052563823, -0.2840155429615824,
     0.0004724845739124, 0.1287474266204893, -0.0173693010018090,
     -0.0440882539307971, 0.0139810279174001, 0.0087460940474065,
     -0.0048703529934520, -0.0003917403733770, 0.0006754494064506,
     -0.0001174767841248},
};

std::vector<double> highpass_from(const std::vector<double>& lo) {
  const std::size_t n = lo.size();
  std::vector<double> hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * lo[n - 1 - k];
  }
  return hi;
}

void check_spec(const WaveletSpec& spec) {
  if (spec.daubechies_index < 1 ||
      spec.daubechies_index > static_cast<int>(kDaubechiesFilters.size())) {
    throw ParameterError("daubechies index must be in 1.." +
                         std::to_string(kDaubechiesFilters.size()));
  }
  if (spec.levels < 1) throw ParameterError("levels must be >= 1");
}

// One analysis level with periodic extension. Odd input lengths are padded
// with a trailing zero so the transform stays orthogonal (the pad adds no
// energy) and both outputs have ceil(n/2) coefficients.
void analyze_level(const std::vector<double>& x, const std::vector<double>& lo,
                   const std::vector<double>& hi, std::vector<double>& a,
                   std::vector<double>& d) {
  const long n = static_cast<long>(x.size());
  const long n_eff = n + (n % 2);
  const long half = n_eff / 2;
  const long taps = static_cast<long>(lo.size());
  a.assign(half, 0.0);
  d.assign(half, 0.0);
  for (long i = 0; i < half; ++i) {
    double sa = 0.0, sd = 0.0;
    for (long k = 0; k < taps; ++k) {
      const long idx = (2 * i + k) % n_eff;
      if (idx >= n) continue;  // zero pad
      const double v = x[idx];
      sa += lo[k] * v;
      sd += hi[k] * v;
    }
    a[i] = sa;
    d[i] = sd;
  }
}

// Transpose of analyze_level; reconstructs n samples.
std::vector<double> synthesize_level(const std::vector<double>& a,
                                     const std::vector<double>& d, long n,
                                     const std::vector<double>& lo,
                                     const std::vector<double>& hi) {
  const long n_eff = n + (n % 2);
  const long half = n_eff / 2;
  const long taps = static_cast<long>(lo.size());
  std::vector<double> x(n_eff, 0.0);
  for (long i = 0; i < half; ++i) {
    const double va = a[i];
    const double vd = d[i];
    for (long k = 0; k < taps; ++k) {
      const long idx = (2 * i + k) % n_eff;
      x[idx] += lo[k] * va + hi[k] * vd;
    }
  }
  x.resize(n);
  return x;
}

long ceil_half(long n) { return (n + 1) / 2; }

}  // namespace

const std::vector<double>& daubechies_filter(int index) {
  if (index < 1 || index > static_cast<int>(kDaubechiesFilters.size())) {
    throw ParameterError("daubechies index must be in 1.." +
                         std::to_string(kDaubechiesFilters.size()));
  }
  return kDaubechiesFilters[static_cast<std::size_t>(index - 1)];
}

DwtCoeffs dwt_decompose(const Eigen::VectorXd& series, const WaveletSpec& spec) {
  check_spec(spec);
  const long n = series.size();
  const long min_len = 1L << spec.levels;
  if (n < min_len) {
    throw ParameterError("series of " + std::to_string(n) +
                         " samples is too short for " +
                         std::to_string(spec.levels) + " levels (need >= " +
                         std::to_string(min_len) + ")");
  }

  const auto& lo = daubechies_filter(spec.daubechies_index);
  const auto hi = highpass_from(lo);

  DwtCoeffs out;
  out.spec = spec;
  out.original_len = n;
  out.details.reserve(spec.levels);

  std::vector<double> cur(series.data(), series.data() + n);
  for (int level = 0; level < spec.levels; ++level) {
    std::vector<double> a, d;
    analyze_level(cur, lo, hi, a, d);
    out.details.push_back(std::move(d));
    cur = std::move(a);
  }
  out.approx = std::move(cur);
  return out;
}

Eigen::VectorXd dwt_reconstruct(const DwtCoeffs& coeffs) {
  check_spec(coeffs.spec);
  const int levels = coeffs.spec.levels;
  if (static_cast<int>(coeffs.details.size()) != levels) {
    throw DataError("expected " + std::to_string(levels) +
                    " detail series, got " +
                    std::to_string(coeffs.details.size()));
  }

  // Input length of each level follows from the original length.
  std::vector<long> level_len(levels + 1);
  level_len[0] = coeffs.original_len;
  for (int k = 1; k <= levels; ++k) level_len[k] = ceil_half(level_len[k - 1]);

  for (int k = 0; k < levels; ++k) {
    if (static_cast<long>(coeffs.details[k].size()) != level_len[k + 1]) {
      throw DataError("detail D" + std::to_string(k + 1) + " has " +
                      std::to_string(coeffs.details[k].size()) +
                      " coefficients, expected " +
                      std::to_string(level_len[k + 1]));
    }
  }
  if (static_cast<long>(coeffs.approx.size()) != level_len[levels]) {
    throw DataError("approximation has " + std::to_string(coeffs.approx.size()) +
                    " coefficients, expected " +
                    std::to_string(level_len[levels]));
  }

  const auto& lo = daubechies_filter(coeffs.spec.daubechies_index);
  const auto hi = highpass_from(lo);

  std::vector<double> cur = coeffs.approx;
  for (int level = levels - 1; level >= 0; --level) {
    cur = synthesize_level(cur, coeffs.details[level], level_len[level], lo, hi);
  }
  return Eigen::Map<const Eigen::VectorXd>(cur.data(), cur.size());
}

std::pair<double, double> subband_range(const Subband& sb, int levels,
                                        int sample_rate,
                                        SubbandRangeMode mode) {
  if (levels < 1) throw ParameterError("levels must be >= 1");
  if (sb.kind == Subband::Kind::Detail &&
      (sb.level < 1 || sb.level > levels)) {
    throw ParameterError("detail level " + std::to_string(sb.level) +
                         " out of range 1.." + std::to_string(levels));
  }

  if (mode == SubbandRangeMode::Standard) {
    if (sample_rate <= 0) throw ParameterError("sample_rate must be positive");
    const double fs = sample_rate;
    if (sb.kind == Subband::Kind::Approx) {
      return {0.0, fs / std::pow(2.0, levels + 1)};
    }
    return {fs / std::pow(2.0, sb.level + 1), fs / std::pow(2.0, sb.level)};
  }

  // Printed 7-level table; kept verbatim even where it conflicts with the
  // dyadic mapping at fs = 512 (D1's 256-512 Hz range is above Nyquist).
  if (levels != 7) {
    throw ParameterError("the printed sub-band table is defined for 7 levels");
  }
  if (sb.kind == Subband::Kind::Approx) return {0.0, 4.0};
  switch (sb.level) {
    case 1: return {256.0, 512.0};
    case 2: return {128.0, 256.0};
    case 3: return {64.0, 128.0};
    case 4: return {32.0, 64.0};
    case 5: return {16.0, 32.0};
    case 6: return {8.0, 16.0};
    case 7: return {4.0, 8.0};
    default: throw ParameterError("detail level out of range for the table");
  }
}

}  // namespace eegpipe
