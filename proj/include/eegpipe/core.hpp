#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "eegpipe/errors.hpp"

namespace eegpipe {

enum class Condition { TwoD, ThreeD };
enum class Stage { Relax, Watch, Rest };
enum class Band { Delta, Theta, Alpha, Beta, Gamma };

// Comparison stages: I compares Relax vs Rest of the 2D session (R2b-R2a),
// II the same for 3D (R3b-R3a), III compares the two Rest stages (R2a-R3a).
enum class ComparisonStage { I, II, III };

std::string to_string(Condition c);
std::string to_string(Stage s);
std::string to_string(Band b);
std::string to_string(ComparisonStage s);
Condition condition_from_string(const std::string& s);
Stage stage_from_string(const std::string& s);
Band band_from_string(const std::string& s);
ComparisonStage comparison_stage_from_string(const std::string& s);

// 10-20 scalp montage: 20 data channels plus the reference electrode.
struct Montage {
  std::vector<std::string> channels;
  std::string reference;

  // Index of a channel label, -1 if absent.
  int index_of(const std::string& label) const;
};

// The fixed 20-channel montage (Cz reference) in its canonical listing order.
Montage standard_montage();

// Relax / Watch / Rest timing of one trial.
struct ParadigmSpec {
  double relax_s = 9.0;
  double watch_s = 14.0;
  double rest_s = 9.0;
  int trials_per_condition = 15;

  double total_s() const { return relax_s + watch_s + rest_s; }
  double stage_duration_s(Stage s) const;
};

// One trial: channels x time, microvolts.
struct Trial {
  Eigen::MatrixXd samples;
  ParadigmSpec paradigm;
};

struct Recording {
  std::string subject_id;
  Condition condition = Condition::TwoD;
  int sample_rate = 512;
  Montage montage;
  std::vector<Trial> trials;
};

// A contiguous per-stage slice of a trial (channels x time).
struct StageSegment {
  Stage stage = Stage::Rest;
  Eigen::MatrixXd samples;
  int sample_rate = 512;
};

// A frequency band with its PSD-integration range.
struct BandDef {
  Band name = Band::Delta;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

// Canonical integration ranges: delta 1-4, theta 4-8, alpha 8-12, beta 13-30,
// gamma 30-49 Hz. Note the deliberate 12-13 Hz gap between alpha and beta.
const std::array<BandDef, 5>& canonical_bands();
const BandDef& band_def(Band b);

// Total-power integration range for normalization (1-49 Hz, gap included).
inline constexpr double kTotalPowerLoHz = 1.0;
inline constexpr double kTotalPowerHiHz = 49.0;

// Sample-exact closed-open stage boundaries: Relax [0, relax), Watch
// [relax, relax+watch), Rest [relax+watch, total). trim_s drops that many
// seconds from both ends of the selected segment (default keeps everything).
StageSegment stage_slice(const Trial& trial, Stage stage, int sample_rate,
                         double trim_s = 0.0);

}  // namespace eegpipe
