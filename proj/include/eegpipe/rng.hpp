#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace eegpipe {

// splitmix64 step; used to derive independent stream seeds from one base
// seed plus salts (channel, trial, ...). Outputs are stable across platforms.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 0x632be59bd9b4e019ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic generator with portable helpers (std::*_distribution is
// implementation-defined, so draws are derived from raw engine output).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  long below(long n) {
    return static_cast<long>(next() % static_cast<std::uint64_t>(n));
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates with portable draws.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, Rng& rng) {
  for (long i = static_cast<long>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[rng.below(i + 1)]);
  }
}

}  // namespace eegpipe
