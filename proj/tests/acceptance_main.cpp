// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. argv[1] is the path of the CLI binary (used by the
// determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eegpipe/classify.hpp"
#include "eegpipe/features.hpp"
#include "eegpipe/pipeline.hpp"
#include "eegpipe/preprocess.hpp"
#include "eegpipe/rng.hpp"
#include "eegpipe/spectral.hpp"
#include "eegpipe/synth.hpp"
#include "eegpipe/wavelet.hpp"

namespace fs = std::filesystem;
using namespace eegpipe;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::VectorXd sine(double freq, int fs, long n) {
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i) {
    x(i) = std::sin(2.0 * std::numbers::pi * freq * i / fs);
  }
  return x;
}

double trimmed_rms(const Eigen::VectorXd& x, int fs) {
  const Eigen::VectorXd core = x.segment(fs, x.size() - 2 * fs);
  return std::sqrt(core.squaredNorm() / core.size());
}

// ---- criterion 1: pipeline bookkeeping -----------------------------------

void criterion_1() {
  const SessionPair pair = generate_preset_pair("null", 1, "c1");

  const StageSegment rest =
      stage_slice(pair.two_d.trials[0], Stage::Rest, 512);
  const std::size_t epochs_per_trial = epoch_segment(rest).size();

  AssembleOptions opts;
  opts.kind = FeatureKind::Dwt;
  opts.seed = 1;
  const FeatureDataset ds = assemble_dataset(pair.two_d, pair.three_d, opts);

  long per_class_2d = 0, train_2d = 0, test_2d = 0;
  for (Condition c : ds.labels) {
    if (c == Condition::TwoD) ++per_class_2d;
  }
  for (long i : ds.train_idx) {
    if (ds.labels[i] == Condition::TwoD) ++train_2d;
  }
  for (long i : ds.test_idx) {
    if (ds.labels[i] == Condition::TwoD) ++test_2d;
  }

  const BandPowerMatrix m = band_power_matrix(
      rest, pair.two_d.montage.channels, "R2a", 512, 8);

  const bool pass = epochs_per_trial == 11 && per_class_2d == 165 &&
                    ds.epoch_count() == 330 && train_2d == 83 &&
                    test_2d == 82 && ds.train_idx.size() == 166 &&
                    ds.test_idx.size() == 164 && m.values.rows() == 20 &&
                    m.values.cols() == 5;
  std::ostringstream msg;
  msg << "bookkeeping: " << epochs_per_trial << " epochs/trial, "
      << per_class_2d << "/class of " << ds.epoch_count() << ", split "
      << train_2d << "/" << test_2d << " per class, band matrix "
      << m.values.rows() << "x" << m.values.cols();
  report(1, pass, msg.str());
}

// ---- criterion 2: DWT perfect reconstruction + Parseval ------------------

void criterion_2() {
  const auto start = Clock::now();
  double worst_pr = 0.0, worst_parseval = 0.0;
  Rng rng(2);
  for (long n : {1024L, 2048L, 4608L, 5000L}) {
    Eigen::VectorXd x(n);
    for (long i = 0; i < n; ++i) x(i) = rng.gaussian();
    const DwtCoeffs c = dwt_decompose(x, {1, 7});
    const Eigen::VectorXd r = dwt_reconstruct(c);
    worst_pr = std::max(worst_pr, (r - x).cwiseAbs().maxCoeff());
    double energy = 0.0;
    for (const auto& d : c.details) {
      for (double v : d) energy += v * v;
    }
    for (double v : c.approx) energy += v * v;
    worst_parseval = std::max(
        worst_parseval, std::abs(energy - x.squaredNorm()) / x.squaredNorm());
  }
  const double elapsed = seconds_since(start);
  const bool pass =
      worst_pr < 1e-9 && worst_parseval < 1e-9 && elapsed < 1.0;
  std::ostringstream msg;
  msg << "dwt round-trip max error " << worst_pr << ", parseval rel "
      << worst_parseval << ", " << elapsed << " s";
  report(2, pass, msg.str());
}

// ---- criterion 3: spectral correctness ------------------------------------

void criterion_3() {
  const Eigen::VectorXd x = sine(10.0, 512, 4608);
  const PsdCurve psd = channel_psd(x, 512, 512, 1);
  const std::array<double, 5> pct = normalized_band_powers(psd);
  const double alpha = pct[static_cast<int>(Band::Alpha)];

  const PsdCurve scaled_psd = channel_psd(3.7 * x, 512, 512, 1);
  const std::array<double, 5> scaled = normalized_band_powers(scaled_psd);
  double invariance = 0.0;
  for (int b = 0; b < 5; ++b) {
    invariance = std::max(invariance, std::abs(pct[b] - scaled[b]));
  }

  Rng rng(3);
  PsdCurve noisy;
  for (int k = 0; k <= 256; ++k) {
    noisy.freq.push_back(k);
    noisy.power.push_back(rng.uniform() + 0.1);
  }
  double additivity = 0.0;
  for (double mid : {4.0, 8.0, 12.7, 30.0}) {
    const double whole = band_power(noisy, 1.0, 49.0);
    const double split =
        band_power(noisy, 1.0, mid) + band_power(noisy, mid, 49.0);
    additivity = std::max(additivity, std::abs(whole - split) / whole);
  }

  const bool pass = alpha >= 95.0 && invariance < 1e-9 && additivity < 1e-9;
  std::ostringstream msg;
  msg << "10 Hz sine alpha " << alpha << "%, scale invariance " << invariance
      << ", additivity rel " << additivity;
  report(3, pass, msg.str());
}

// ---- criterion 4: zero-phase filtering ------------------------------------

void criterion_4() {
  const int fs = 512;
  const Eigen::VectorXd tone = sine(10.0, fs, 8 * fs);
  const Eigen::VectorXd band = butter_bandpass_zero_phase(tone, 1, 55, 3, fs);
  long best_lag = -999;
  double best = -1e300;
  for (long lag = -50; lag <= 50; ++lag) {
    double acc = 0.0;
    for (long i = fs; i < tone.size() - fs; ++i) acc += band(i) * tone(i + lag);
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }

  const Eigen::VectorXd hum = sine(50.0, fs, 8 * fs);
  const double notch_db = -20.0 * std::log10(
      trimmed_rms(notch_50(hum, fs), fs) / trimmed_rms(hum, fs));

  const Eigen::VectorXd out_of_band = sine(80.0, fs, 8 * fs);
  const Eigen::VectorXd filtered =
      butter_bandpass_zero_phase(out_of_band, 1, 55, 3, fs);
  const double measured_db = -20.0 * std::log10(
      trimmed_rms(filtered, fs) / trimmed_rms(out_of_band, fs));

  // Analytic squared order-3 Butterworth response at the warped frequency.
  auto warp = [&](double hz) {
    return 2.0 * fs * std::tan(std::numbers::pi * hz / fs);
  };
  const double w = warp(80.0), w1 = warp(1.0), w2 = warp(55.0);
  const double omega = (w * w - w1 * w2) / ((w2 - w1) * w);
  const double analytic_db =
      -10.0 * std::log10(std::pow(1.0 / (1.0 + std::pow(omega, 6.0)), 2.0));

  const bool pass = best_lag == 0 && notch_db >= 20.0 && measured_db >= 18.0 &&
                    std::abs(measured_db - analytic_db) <= 1.0;
  std::ostringstream msg;
  msg << "xcorr lag " << best_lag << ", notch " << notch_db << " dB, 80 Hz "
      << measured_db << " dB (analytic " << analytic_db << " dB)";
  report(4, pass, msg.str());
}

// ---- criterion 5: classifier oracles --------------------------------------

void criterion_5() {
  // PLSR with full components vs the normal-equations solution.
  double worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(50, 5);
    std::vector<int> y(50);
    for (long i = 0; i < 50; ++i) {
      for (long j = 0; j < 5; ++j) X(i, j) = rng.gaussian();
      y[i] = rng.uniform() < 0.5 ? -1 : 1;
    }
    y[0] = 1;
    y[1] = -1;
    const PlsrModel model = plsr_fit(X, y, 5);

    Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    Eigen::VectorXd yv(50);
    for (int i = 0; i < 50; ++i) yv(i) = y[i];
    yv.array() -= yv.mean();
    const Eigen::VectorXd ols =
        (Xc.transpose() * Xc).ldlt().solve(Xc.transpose() * yv);
    worst_rel = std::max(worst_rel, (model.beta - ols).norm() / ols.norm());
  }

  // XOR separation.
  Eigen::MatrixXd X(4, 2);
  X << 1, 1, 1, -1, -1, 1, -1, -1;
  const std::vector<int> y_xor = {1, -1, -1, 1};
  const Prediction xor_pred =
      svm_predict(svm_fit(X, y_xor, 0.5, 10.0), X);
  const bool xor_ok = xor_pred.labels == y_xor;

  // Confusion counting against a brute-force tally.
  Rng rng(55);
  bool confusion_ok = true;
  for (int rep = 0; rep < 1000 && confusion_ok; ++rep) {
    const int n = 1 + static_cast<int>(rng.below(80));
    std::vector<int> truth(n), pred(n);
    long tp = 0, fp = 0, fn = 0, tn = 0;
    for (int i = 0; i < n; ++i) {
      truth[i] = rng.uniform() < 0.5 ? 1 : -1;
      pred[i] = rng.uniform() < 0.5 ? 1 : -1;
      if (truth[i] > 0 && pred[i] > 0) ++tp;
      if (truth[i] > 0 && pred[i] < 0) ++fn;
      if (truth[i] < 0 && pred[i] > 0) ++fp;
      if (truth[i] < 0 && pred[i] < 0) ++tn;
    }
    const EvalReport r = confusion_metrics_signed(pred, truth);
    confusion_ok = r.tp == tp && r.fp == fp && r.fn == fn && r.tn == tn;
  }

  const bool pass = worst_rel < 1e-6 && xor_ok && confusion_ok;
  std::ostringstream msg;
  msg << "plsr vs least squares rel " << worst_rel << ", xor "
      << (xor_ok ? "separated" : "failed") << ", confusion counts "
      << (confusion_ok ? "exact" : "mismatch");
  report(5, pass, msg.str());
}

// ---- criterion 6: end-to-end synthetic stage III --------------------------

void criterion_6() {
  const auto start = Clock::now();
  std::vector<SubjectData> subjects;
  for (int s = 0; s < 5; ++s) {
    const std::string id = "s0" + std::to_string(s + 1);
    SessionPair pair = generate_preset_pair(
        "stage3-paper-like", mix_seed(7, static_cast<std::uint64_t>(s)), id);
    subjects.push_back({id, std::move(pair.two_d), std::move(pair.three_d)});
  }

  BandSelectConfig bc;
  bc.stage = ComparisonStage::III;
  bc.decimation = 8;
  const BandSelectResult bands = run_band_selection(subjects, bc);
  const bool bands_ok =
      bands.report.selected() == std::vector<Band>{Band::Delta, Band::Alpha};

  ClassifyConfig cc;
  cc.feature = FeatureKind::Dwt;
  cc.classifier = ClassifierKind::Svm;
  cc.seed = 7;
  cc.decimation = 8;
  const ClassifyRunResult clf = run_classification(subjects, cc);

  // Injected channels must rank in the top 8 of the mean accuracy ranking.
  std::vector<int> order(clf.channels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return clf.mean_channel_accuracy[a] > clf.mean_channel_accuracy[b];
  });
  const std::set<std::string> injected(stage3_injected_channels().begin(),
                                       stage3_injected_channels().end());
  int in_top8 = 0;
  for (int i = 0; i < 8; ++i) {
    if (injected.count(clf.channels[order[i]])) ++in_top8;
  }

  const double elapsed = seconds_since(start);
  const bool pass = bands_ok && clf.mean_best_accuracy >= 0.90 &&
                    in_top8 == 6 && elapsed < 300.0;
  std::ostringstream msg;
  msg << "bandselect " << (bands_ok ? "{delta, alpha}" : "wrong set")
      << ", svm+dwt mean best accuracy " << clf.mean_best_accuracy
      << ", injected in top 8: " << in_top8 << "/6, " << elapsed << " s";
  report(6, pass, msg.str());
}

// ---- criterion 7: null control ---------------------------------------------

void criterion_7() {
  double sum = 0.0;
  for (int s = 0; s < 20; ++s) {
    const std::uint64_t seed = 1000 + 17 * static_cast<std::uint64_t>(s);
    SessionPair pair = generate_preset_pair("null", seed, "n");
    std::vector<SubjectData> subjects;
    subjects.push_back({"n", std::move(pair.two_d), std::move(pair.three_d)});
    ClassifyConfig cc;
    cc.feature = FeatureKind::Dwt;
    cc.classifier = ClassifierKind::Svm;
    cc.seed = seed + 1;
    sum += run_classification(subjects, cc).mean_best_accuracy;
  }
  const double mean = sum / 20.0;
  const bool pass = mean >= 0.40 && mean <= 0.60;
  std::ostringstream msg;
  msg << "null mean best-combination accuracy over 20 seeds: " << mean;
  report(7, pass, msg.str());
}

// ---- criterion 8: CLI determinism ------------------------------------------

bool run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

bool trees_identical(const fs::path& a, const fs::path& b) {
  std::vector<fs::path> rel;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.is_regular_file()) {
      rel.push_back(fs::relative(entry.path(), a));
    }
  }
  if (rel.empty()) return false;
  for (const fs::path& r : rel) {
    std::ifstream fa(a / r, std::ios::binary);
    std::ifstream fb(b / r, std::ios::binary);
    if (!fa || !fb) return false;
    std::stringstream ba, bb;
    ba << fa.rdbuf();
    bb << fb.rdbuf();
    if (ba.str() != bb.str()) return false;
  }
  return true;
}

void criterion_8(const std::string& cli) {
  const fs::path work = fs::temp_directory_path() / "eegpipe_acceptance_det";
  fs::remove_all(work);

  bool ok = true;
  for (int run = 0; run < 2 && ok; ++run) {
    const fs::path root = work / ("run" + std::to_string(run));
    ok = run_cli(cli, "synth --preset stage3-paper-like --seed 11 --subjects 1 -o " +
                          (root / "data").string());
    ok = ok && run_cli(cli, "bandselect --data " + (root / "data").string() +
                                " --stage III --decimation 8 -o " +
                                (root / "bands").string());
    ok = ok && run_cli(cli, "classify --data " + (root / "data").string() +
                                " --features dwt --classifiers svm --seed 3 " +
                                "--decimation 8 --max-prefix 4 -o " +
                                (root / "clf").string());
    ok = ok && run_cli(cli, "featurize --data " + (root / "data").string() +
                                " --features dwt --seed 3 -o " +
                                (root / "feat").string());
  }
  const bool identical =
      ok && trees_identical(work / "run0", work / "run1");
  report(8, ok && identical,
         std::string("CLI rerun outputs ") +
             (identical ? "byte-identical" : "differ or failed"));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <path-to-eegpipe-cli>\n");
    return 2;
  }
  const std::string cli = argv[1];

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8(cli);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
