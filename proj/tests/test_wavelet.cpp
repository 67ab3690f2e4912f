#include <doctest.h>

#include <chrono>
#include <cmath>

#include "eegpipe/rng.hpp"
#include "eegpipe/wavelet.hpp"

using namespace eegpipe;

namespace {

Eigen::VectorXd random_series(long n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = rng.gaussian();
  return v;
}

double coeff_energy(const DwtCoeffs& c) {
  double e = 0.0;
  for (const auto& d : c.details) {
    for (double v : d) e += v * v;
  }
  for (double v : c.approx) e += v * v;
  return e;
}

}  // namespace

TEST_CASE("daubechies filters satisfy the orthonormal QMF conditions") {
  for (int index = 1; index <= 8; ++index) {
    const std::vector<double>& h = daubechies_filter(index);
    CHECK(h.size() == static_cast<std::size_t>(2 * index));

    double sum = 0.0, energy = 0.0;
    for (double v : h) {
      sum += v;
      energy += v * v;
    }
    CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(energy == doctest::Approx(1.0).epsilon(1e-12));

    for (std::size_t shift = 2; shift < h.size(); shift += 2) {
      double dot = 0.0;
      for (std::size_t k = 0; k + shift < h.size(); ++k) {
        dot += h[k] * h[k + shift];
      }
      CHECK(std::abs(dot) < 1e-12);
    }
  }
  CHECK_THROWS_AS(daubechies_filter(0), ParameterError);
  CHECK_THROWS_AS(daubechies_filter(9), ParameterError);
}

TEST_CASE("db1 seven-level decomposition has dyadic coefficient counts") {
  const DwtCoeffs c = dwt_decompose(random_series(2048, 5), {1, 7});
  CHECK(c.details.size() == 7);
  CHECK(c.details[0].size() == 1024);
  CHECK(c.details[6].size() == 16);
  CHECK(c.approx.size() == 16);
}

TEST_CASE("constant series has zero details and scaled approximation") {
  const double value = 3.25;
  const DwtCoeffs c =
      dwt_decompose(Eigen::VectorXd::Constant(1024, value), {1, 7});
  for (const auto& d : c.details) {
    for (double v : d) CHECK(std::abs(v) < 1e-12);
  }
  const double expected = value * std::pow(2.0, 3.5);  // sqrt(2) per level
  for (double v : c.approx) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("haar analysis of [1, -1]") {
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  const DwtCoeffs c = dwt_decompose(x, {1, 1});
  REQUIRE(c.details[0].size() == 1);
  CHECK(c.details[0][0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(c.approx[0]) < 1e-15);
}

TEST_CASE("haar level-1 details of a ramp are constant") {
  Eigen::VectorXd ramp(256);
  for (long i = 0; i < 256; ++i) ramp(i) = 2.5 * i;
  const DwtCoeffs c = dwt_decompose(ramp, {1, 1});
  const double expected = -2.5 / std::sqrt(2.0);
  for (double v : c.details[0]) {
    CHECK(v == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("perfect reconstruction and energy conservation across families") {
  for (int index : {1, 2, 3, 5, 8}) {
    for (long n : {1024L, 4608L, 5000L, 777L}) {
      const int levels = index == 1 ? 7 : 3;
      if (n < (1L << levels)) continue;
      const Eigen::VectorXd x = random_series(n, 100 + index + n);
      const DwtCoeffs c = dwt_decompose(x, {index, levels});
      const Eigen::VectorXd r = dwt_reconstruct(c);
      REQUIRE(r.size() == n);
      CHECK((r - x).cwiseAbs().maxCoeff() < 1e-9);
      const double in = x.squaredNorm();
      CHECK(std::abs(coeff_energy(c) - in) / in < 1e-9);
    }
  }
}

TEST_CASE("round trip of a random 4096-sample series is exact to 1e-9") {
  const Eigen::VectorXd x = random_series(4096, 17);
  const Eigen::VectorXd r = dwt_reconstruct(dwt_decompose(x, {1, 7}));
  CHECK((r - x).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("acceptance lengths round trip in under a second") {
  const auto start = std::chrono::steady_clock::now();
  for (long n : {1024L, 2048L, 4608L, 5000L}) {
    const Eigen::VectorXd x = random_series(n, n);
    const DwtCoeffs c = dwt_decompose(x, {1, 7});
    CHECK((dwt_reconstruct(c) - x).cwiseAbs().maxCoeff() < 1e-9);
    const double in = x.squaredNorm();
    CHECK(std::abs(coeff_energy(c) - in) / in < 1e-9);
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  CHECK(elapsed < 1.0);
}

TEST_CASE("zero coefficients reconstruct to a zero series") {
  DwtCoeffs c = dwt_decompose(random_series(512, 3), {1, 4});
  for (auto& d : c.details) std::fill(d.begin(), d.end(), 0.0);
  std::fill(c.approx.begin(), c.approx.end(), 0.0);
  CHECK(dwt_reconstruct(c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decompose rejects series shorter than 2^levels") {
  CHECK_THROWS_AS(dwt_decompose(random_series(100, 1), {1, 7}), ParameterError);
}

TEST_CASE("reconstruct rejects inconsistent coefficient lengths") {
  DwtCoeffs c = dwt_decompose(random_series(512, 4), {1, 4});
  c.details[1].pop_back();
  CHECK_THROWS_AS(dwt_reconstruct(c), DataError);
}

TEST_CASE("subband ranges: printed table and dyadic mapping") {
  CHECK(subband_range({Subband::Kind::Detail, 7}, 7, 512,
                      SubbandRangeMode::PaperTable) ==
        std::pair<double, double>{4.0, 8.0});
  CHECK(subband_range({Subband::Kind::Approx, 7}, 7, 512,
                      SubbandRangeMode::PaperTable) ==
        std::pair<double, double>{0.0, 4.0});
  CHECK(subband_range({Subband::Kind::Detail, 1}, 7, 512,
                      SubbandRangeMode::PaperTable) ==
        std::pair<double, double>{256.0, 512.0});  // verbatim, above Nyquist

  CHECK(subband_range({Subband::Kind::Detail, 1}, 7, 512,
                      SubbandRangeMode::Standard) ==
        std::pair<double, double>{128.0, 256.0});
  CHECK(subband_range({Subband::Kind::Approx, 7}, 7, 512,
                      SubbandRangeMode::Standard) ==
        std::pair<double, double>{0.0, 2.0});

  CHECK_THROWS_AS(subband_range({Subband::Kind::Detail, 8}, 7, 512,
                                SubbandRangeMode::PaperTable),
                  ParameterError);
  CHECK_THROWS_AS(subband_range({Subband::Kind::Detail, 3}, 5, 512,
                                SubbandRangeMode::PaperTable),
                  ParameterError);
}
