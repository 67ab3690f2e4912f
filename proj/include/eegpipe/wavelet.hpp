#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "eegpipe/errors.hpp"

namespace eegpipe {

// Multi-level orthogonal DWT, Daubechies family db1 (Haar) .. db8.
struct WaveletSpec {
  int daubechies_index = 1;
  int levels = 7;
};

// Cascade output: detail series D1..DL plus the final approximation AL.
// Coefficient lengths follow ceil-halving of the previous level's length.
struct DwtCoeffs {
  std::vector<std::vector<double>> details;
  std::vector<double> approx;
  WaveletSpec spec;
  long original_len = 0;
};

// Scaling (lowpass analysis) filter for dbN; length 2N, sums to sqrt(2).
const std::vector<double>& daubechies_filter(int index);

DwtCoeffs dwt_decompose(const Eigen::VectorXd& series, const WaveletSpec& spec);
Eigen::VectorXd dwt_reconstruct(const DwtCoeffs& coeffs);

// Identifies one sub-band of an L-level decomposition.
struct Subband {
  enum class Kind { Detail, Approx };
  Kind kind = Kind::Detail;
  int level = 1;
};

enum class SubbandRangeMode {
  Standard,    // dyadic: Dk covers (fs/2^{k+1}, fs/2^k], AL covers [0, fs/2^{L+1}]
  PaperTable,  // the printed 7-level table (D7 = 4-8 Hz, A7 = 0-4 Hz, ...)
};

// Frequency range (f_lo, f_hi) in Hz for a sub-band. PaperTable mode returns
// the table's printed values verbatim; note they exceed Nyquist at fs = 512
// for the shallow levels and disagree with the dyadic mapping by one octave.
std::pair<double, double> subband_range(const Subband& sb, int levels,
                                        int sample_rate,
                                        SubbandRangeMode mode = SubbandRangeMode::PaperTable);

}  // namespace eegpipe
