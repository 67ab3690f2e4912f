#include <doctest.h>

#include <set>

#include "eegpipe/core.hpp"
#include "eegpipe/rng.hpp"

using namespace eegpipe;

namespace {

Trial random_trial(int sample_rate, std::uint64_t seed) {
  Rng rng(seed);
  Trial t;
  t.samples.resize(20, std::lround(t.paradigm.total_s() * sample_rate));
  for (long ch = 0; ch < t.samples.rows(); ++ch) {
    for (long i = 0; i < t.samples.cols(); ++i) {
      t.samples(ch, i) = rng.uniform(-50.0, 50.0);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("standard montage lists the 20 channels in order") {
  const Montage m = standard_montage();
  CHECK(m.channels.size() == 20);
  CHECK(m.channels[0] == "Fp1");
  CHECK(m.channels[19] == "Oz");
  CHECK(m.reference == "Cz");

  const std::set<std::string> unique(m.channels.begin(), m.channels.end());
  CHECK(unique.size() == 20);

  CHECK(standard_montage().channels == m.channels);  // order-stable
  CHECK(m.index_of("P3") == 10);
  CHECK(m.index_of("Cz") == -1);
}

TEST_CASE("canonical bands cover 1-49 Hz with only the 12-13 Hz gap") {
  const auto& bands = canonical_bands();
  CHECK(bands.size() == 5);
  CHECK(bands[0].f_lo == 1.0);
  CHECK(bands[0].f_hi == 4.0);
  CHECK(bands[2].f_lo == 8.0);
  CHECK(bands[2].f_hi == 12.0);
  CHECK(bands[3].f_lo == 13.0);
  CHECK(bands[4].f_hi == 49.0);

  double covered = 0.0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    CHECK(bands[i].f_lo < bands[i].f_hi);
    if (i > 0) CHECK(bands[i].f_lo >= bands[i - 1].f_hi);  // no overlap
    covered += bands[i].f_hi - bands[i].f_lo;
  }
  CHECK(covered == doctest::Approx(48.0 - 1.0));  // one 1 Hz gap
}

TEST_CASE("stage_slice returns sample-exact boundaries at 512 Hz") {
  const Trial t = random_trial(512, 1);
  CHECK(stage_slice(t, Stage::Relax, 512).samples.cols() == 4608);
  CHECK(stage_slice(t, Stage::Watch, 512).samples.cols() == 7168);

  const StageSegment rest = stage_slice(t, Stage::Rest, 512);
  CHECK(rest.samples.cols() == 16384 - 11776);
  CHECK(rest.samples(3, 0) == t.samples(3, 11776));
  CHECK(rest.samples(3, rest.samples.cols() - 1) == t.samples(3, 16383));
}

TEST_CASE("stage slices partition the trial") {
  const Trial t = random_trial(256, 2);
  const StageSegment relax = stage_slice(t, Stage::Relax, 256);
  const StageSegment watch = stage_slice(t, Stage::Watch, 256);
  const StageSegment rest = stage_slice(t, Stage::Rest, 256);

  Eigen::MatrixXd glued(t.samples.rows(), t.samples.cols());
  glued << relax.samples, watch.samples, rest.samples;
  CHECK((glued - t.samples).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stage_slice rejects malformed trials naming the counts") {
  Trial t = random_trial(512, 3);
  t.samples.conservativeResize(20, 1000);
  CHECK_THROWS_WITH_AS(stage_slice(t, Stage::Rest, 512),
                       doctest::Contains("expected 16384"), DataError);
}

TEST_CASE("stage_slice trim drops samples from both ends") {
  const Trial t = random_trial(512, 4);
  const StageSegment rest = stage_slice(t, Stage::Rest, 512, 0.5);
  CHECK(rest.samples.cols() == 4608 - 512);
  CHECK(rest.samples(0, 0) == t.samples(0, 11776 + 256));
  CHECK_THROWS_AS(stage_slice(t, Stage::Relax, 512, 5.0), ParameterError);
}

TEST_CASE("enum string round trips") {
  CHECK(condition_from_string(to_string(Condition::ThreeD)) == Condition::ThreeD);
  CHECK(stage_from_string(to_string(Stage::Watch)) == Stage::Watch);
  CHECK(band_from_string(to_string(Band::Gamma)) == Band::Gamma);
  CHECK(comparison_stage_from_string("III") == ComparisonStage::III);
  CHECK_THROWS_AS(band_from_string("sigma"), ParameterError);
}
