#include "eegpipe/core.hpp"

#include <cmath>

namespace eegpipe {

std::string to_string(Condition c) {
  return c == Condition::TwoD ? "2D" : "3D";
}

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Relax: return "Relax";
    case Stage::Watch: return "Watch";
    case Stage::Rest: return "Rest";
  }
  return "?";
}

std::string to_string(Band b) {
  switch (b) {
    case Band::Delta: return "delta";
    case Band::Theta: return "theta";
    case Band::Alpha: return "alpha";
    case Band::Beta: return "beta";
    case Band::Gamma: return "gamma";
  }
  return "?";
}

std::string to_string(ComparisonStage s) {
  switch (s) {
    case ComparisonStage::I: return "I";
    case ComparisonStage::II: return "II";
    case ComparisonStage::III: return "III";
  }
  return "?";
}

Condition condition_from_string(const std::string& s) {
  if (s == "2D" || s == "2d" || s == "TwoD") return Condition::TwoD;
  if (s == "3D" || s == "3d" || s == "ThreeD") return Condition::ThreeD;
  throw ParameterError("unknown condition '" + s + "' (expected 2D or 3D)");
}

Stage stage_from_string(const std::string& s) {
  if (s == "Relax" || s == "relax") return Stage::Relax;
  if (s == "Watch" || s == "watch") return Stage::Watch;
  if (s == "Rest" || s == "rest") return Stage::Rest;
  throw ParameterError("unknown stage '" + s + "'");
}

Band band_from_string(const std::string& s) {
  if (s == "delta") return Band::Delta;
  if (s == "theta") return Band::Theta;
  if (s == "alpha") return Band::Alpha;
  if (s == "beta") return Band::Beta;
  if (s == "gamma") return Band::Gamma;
  throw ParameterError("unknown band '" + s + "'");
}

ComparisonStage comparison_stage_from_string(const std::string& s) {
  if (s == "I" || s == "1") return ComparisonStage::I;
  if (s == "II" || s == "2") return ComparisonStage::II;
  if (s == "III" || s == "3") return ComparisonStage::III;
  throw ParameterError("unknown comparison stage '" + s + "' (expected I, II or III)");
}

int Montage::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

Montage standard_montage() {
  return Montage{
      {"Fp1", "Fpz", "Fp2", "F3", "F4", "F7", "F8", "C3", "C4", "Fz",
       "P3", "P4", "Pz", "O1", "O2", "T3", "T4", "T5", "T6", "Oz"},
      "Cz"};
}

double ParadigmSpec::stage_duration_s(Stage s) const {
  switch (s) {
    case Stage::Relax: return relax_s;
    case Stage::Watch: return watch_s;
    case Stage::Rest: return rest_s;
  }
  return 0.0;
}

const std::array<BandDef, 5>& canonical_bands() {
  static const std::array<BandDef, 5> bands = {{
      {Band::Delta, 1.0, 4.0},
      {Band::Theta, 4.0, 8.0},
      {Band::Alpha, 8.0, 12.0},
      {Band::Beta, 13.0, 30.0},
      {Band::Gamma, 30.0, 49.0},
  }};
  return bands;
}

const BandDef& band_def(Band b) {
  return canonical_bands()[static_cast<std::size_t>(b)];
}

StageSegment stage_slice(const Trial& trial, Stage stage, int sample_rate,
                         double trim_s) {
  if (sample_rate <= 0) throw ParameterError("sample_rate must be positive");
  const auto& p = trial.paradigm;
  const long relax_n = std::lround(p.relax_s * sample_rate);
  const long watch_n = std::lround(p.watch_s * sample_rate);
  const long rest_n = std::lround(p.rest_s * sample_rate);
  const long total_n = relax_n + watch_n + rest_n;
  if (trial.samples.cols() != total_n) {
    throw DataError("trial has " + std::to_string(trial.samples.cols()) +
                    " samples, expected " + std::to_string(total_n) + " (" +
                    std::to_string(p.total_s()) + " s at " +
                    std::to_string(sample_rate) + " Hz)");
  }

  long start = 0;
  long end = 0;
  switch (stage) {
    case Stage::Relax:
      start = 0;
      end = relax_n;
      break;
    case Stage::Watch:
      start = relax_n;
      end = relax_n + watch_n;
      break;
    case Stage::Rest:
      start = relax_n + watch_n;
      end = total_n;
      break;
  }

  const long trim_n = std::lround(trim_s * sample_rate);
  if (trim_n < 0) throw ParameterError("trim_s must be non-negative");
  start += trim_n;
  end -= trim_n;
  if (start >= end) {
    throw ParameterError("trim of " + std::to_string(trim_s) +
                         " s leaves an empty " + to_string(stage) + " segment");
  }

  StageSegment seg;
  seg.stage = stage;
  seg.sample_rate = sample_rate;
  seg.samples = trial.samples.middleCols(start, end - start);
  return seg;
}

}  // namespace eegpipe
