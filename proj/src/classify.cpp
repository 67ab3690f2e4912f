#include "eegpipe/classify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <thread>

#include "eegpipe/rng.hpp"

namespace eegpipe {

namespace {

void check_two_classes(const std::vector<int>& y) {
  bool pos = false, neg = false;
  for (int v : y) {
    if (v > 0) pos = true;
    else neg = true;
  }
  if (!pos || !neg) {
    throw ParameterError("training labels must contain both classes");
  }
}

Eigen::VectorXd to_label_vector(const std::vector<int>& y) {
  Eigen::VectorXd v(static_cast<long>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) v(static_cast<long>(i)) = y[i];
  return v;
}

// Pooled per-column SD around the column means; the sigma grid scales off it.
double pooled_feature_sd(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) return 0.0;
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const double ss = (X.rowwise() - mean).squaredNorm();
  return std::sqrt(ss / static_cast<double>(X.rows() * X.cols()));
}

}  // namespace

PlsrModel plsr_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   int n_components) {
  const long n = X.rows();
  const long p = X.cols();
  if (n < 2) throw ParameterError("plsr_fit needs at least two samples");
  if (static_cast<long>(y.size()) != n) {
    throw ParameterError("label count does not match sample count");
  }
  check_two_classes(y);
  if (n_components < 1) throw ParameterError("n_components must be >= 1");
  if (n_components > std::min(p, n - 1)) {
    throw ParameterError("n_components " + std::to_string(n_components) +
                         " exceeds the achievable rank (min of " +
                         std::to_string(p) + " features, " +
                         std::to_string(n - 1) + ")");
  }

  PlsrModel model;
  model.n_components = n_components;
  model.x_mean = X.colwise().mean().transpose();

  Eigen::VectorXd yv = to_label_vector(y);
  model.intercept = yv.mean();

  Eigen::MatrixXd Xc = X.rowwise() - model.x_mean.transpose();
  Eigen::VectorXd yc = yv.array() - model.intercept;

  model.weights.resize(p, n_components);
  model.loadings.resize(p, n_components);
  model.y_loadings.resize(n_components);

  // Single-response NIPALS: the weight direction X^T y is exact per
  // component, so no inner iteration is required.
  for (int h = 0; h < n_components; ++h) {
    Eigen::VectorXd w = Xc.transpose() * yc;
    const double wn = w.norm();
    if (!(wn > 1e-12)) {
      throw ParameterError("n_components " + std::to_string(n_components) +
                           " exceeds the achievable rank (component " +
                           std::to_string(h + 1) + " vanished)");
    }
    w /= wn;
    const Eigen::VectorXd t = Xc * w;
    const double tt = t.squaredNorm();
    if (!(tt > 1e-20)) {
      throw ParameterError("n_components " + std::to_string(n_components) +
                           " exceeds the achievable rank (score " +
                           std::to_string(h + 1) + " vanished)");
    }
    const Eigen::VectorXd pl = Xc.transpose() * t / tt;
    const double q = yc.dot(t) / tt;

    model.weights.col(h) = w;
    model.loadings.col(h) = pl;
    model.y_loadings(h) = q;

    Xc.noalias() -= t * pl.transpose();
    yc.noalias() -= q * t;
  }

  // beta = W (P^T W)^{-1} q maps centered inputs to centered scores.
  const Eigen::MatrixXd ptw =
      model.loadings.transpose() * model.weights;  // H x H
  model.beta = model.weights *
               ptw.colPivHouseholderQr().solve(model.y_loadings);
  return model;
}

Prediction plsr_predict(const PlsrModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.beta.size()) {
    throw ParameterError("feature dimension " + std::to_string(X.cols()) +
                         " does not match the model (" +
                         std::to_string(model.beta.size()) + ")");
  }
  Prediction pred;
  pred.scores = (X.rowwise() - model.x_mean.transpose()) * model.beta;
  pred.scores.array() += model.intercept;
  pred.labels.resize(X.rows());
  for (long i = 0; i < X.rows(); ++i) {
    pred.labels[static_cast<std::size_t>(i)] = pred.scores(i) >= 0.0 ? 1 : -1;
  }
  return pred;
}

double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  double sigma) {
  if (sigma <= 0.0) throw ParameterError("rbf sigma must be positive");
  if (x.size() != y.size()) {
    throw ParameterError("rbf kernel inputs have different dimensions");
  }
  return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

double SvmModel::dual_sum() const { return dual_coef.sum(); }

SvmModel svm_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                 double sigma, double c, const SvmOptions& opts) {
  const long n = X.rows();
  if (static_cast<long>(y.size()) != n) {
    throw ParameterError("label count does not match sample count");
  }
  check_two_classes(y);
  if (sigma <= 0.0) throw ParameterError("svm sigma must be positive");
  if (c <= 0.0) throw ParameterError("svm box constraint C must be positive");

  // Kernel matrix from pairwise squared distances.
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd K = -2.0 * (X * X.transpose());
  K.colwise() += sq;
  K.rowwise() += sq.transpose();
  K = (-K / (2.0 * sigma * sigma)).array().exp();

  const Eigen::VectorXd yv = to_label_vector(y);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);  // Q alpha - e

  double gap = std::numeric_limits<double>::infinity();
  long iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // Maximal violating pair over -y_i grad_i.
    long i_up = -1, i_low = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (long t = 0; t < n; ++t) {
      const double v = -yv(t) * grad(t);
      const bool in_up = (yv(t) > 0 && alpha(t) < c) || (yv(t) < 0 && alpha(t) > 0);
      const bool in_low = (yv(t) < 0 && alpha(t) < c) || (yv(t) > 0 && alpha(t) > 0);
      if (in_up && v > m_up) {
        m_up = v;
        i_up = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        i_low = t;
      }
    }
    gap = m_up - m_low;
    if (i_up < 0 || i_low < 0 || gap < opts.tol) break;

    const long i = i_up, j = i_low;
    double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
    if (quad <= 1e-12) quad = 1e-12;
    double step = gap / quad;

    // alpha_i += y_i step, alpha_j -= y_j step, clipped to the box.
    double hi = std::numeric_limits<double>::infinity();
    hi = std::min(hi, yv(i) > 0 ? c - alpha(i) : alpha(i));
    hi = std::min(hi, yv(j) > 0 ? alpha(j) : c - alpha(j));
    step = std::min(step, hi);
    if (step <= 0.0) break;

    const double di = yv(i) * step;
    const double dj = -yv(j) * step;
    alpha(i) += di;
    alpha(j) += dj;
    // g_k += Q_ki dα_i + Q_kj dα_j with Q_kt = y_k y_t K_kt.
    grad.array() +=
        yv.array() * (K.col(i).array() * (yv(i) * di) +
                      K.col(j).array() * (yv(j) * dj));
  }

  if (gap >= opts.tol && iter >= opts.max_iter) {
    throw NumericalError("svm solver did not converge after " +
                         std::to_string(opts.max_iter) +
                         " iterations (KKT gap " + std::to_string(gap) + ")");
  }

  // Recompute the violating-pair bounds for the bias.
  double m_up = -std::numeric_limits<double>::infinity();
  double m_low = std::numeric_limits<double>::infinity();
  for (long t = 0; t < n; ++t) {
    const double v = -yv(t) * grad(t);
    const bool in_up = (yv(t) > 0 && alpha(t) < c) || (yv(t) < 0 && alpha(t) > 0);
    const bool in_low = (yv(t) < 0 && alpha(t) < c) || (yv(t) > 0 && alpha(t) > 0);
    if (in_up) m_up = std::max(m_up, v);
    if (in_low) m_low = std::min(m_low, v);
  }

  SvmModel model;
  model.sigma = sigma;
  model.c = c;
  model.iterations = iter;
  model.kkt_gap = std::max(0.0, m_up - m_low);
  model.bias = 0.5 * (m_up + m_low);

  std::vector<long> sv;
  for (long t = 0; t < n; ++t) {
    if (alpha(t) > 1e-12) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<long>(sv.size()), X.cols());
  model.dual_coef.resize(static_cast<long>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<long>(s)) = X.row(sv[s]);
    model.dual_coef(static_cast<long>(s)) = alpha(sv[s]) * yv(sv[s]);
  }
  return model;
}

Prediction svm_predict(const SvmModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() > 0 && model.support_vectors.rows() > 0 &&
      X.cols() != model.support_vectors.cols()) {
    throw ParameterError("feature dimension " + std::to_string(X.cols()) +
                         " does not match the model (" +
                         std::to_string(model.support_vectors.cols()) + ")");
  }
  Prediction pred;
  pred.scores.resize(X.rows());
  pred.labels.resize(X.rows());
  for (long i = 0; i < X.rows(); ++i) {
    double f = model.bias;
    for (long s = 0; s < model.support_vectors.rows(); ++s) {
      const double d2 =
          (model.support_vectors.row(s) - X.row(i)).squaredNorm();
      f += model.dual_coef(s) *
           std::exp(-d2 / (2.0 * model.sigma * model.sigma));
    }
    pred.scores(i) = f;
    pred.labels[static_cast<std::size_t>(i)] = f >= 0.0 ? 1 : -1;
  }
  return pred;
}

EvalReport confusion_metrics_signed(const std::vector<int>& predicted,
                                    const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw ParameterError("prediction and truth lengths differ");
  }
  EvalReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pos_true = truth[i] > 0;
    const bool pos_pred = predicted[i] > 0;
    if (pos_true && pos_pred) ++r.tp;
    else if (!pos_true && !pos_pred) ++r.tn;
    else if (!pos_true && pos_pred) ++r.fp;
    else ++r.fn;
  }
  const long total = r.tp + r.tn + r.fp + r.fn;
  if (total > 0) r.accuracy = static_cast<double>(r.tp + r.tn) / total;
  if (r.tp + r.fn > 0) {
    r.sensitivity = static_cast<double>(r.tp) / (r.tp + r.fn);
  }
  if (r.tn + r.fp > 0) {
    r.specificity = static_cast<double>(r.tn) / (r.tn + r.fp);
  }
  return r;
}

EvalReport confusion_metrics(const std::vector<Condition>& predicted,
                             const std::vector<Condition>& truth) {
  std::vector<int> p, t;
  p.reserve(predicted.size());
  t.reserve(truth.size());
  for (Condition c : predicted) p.push_back(condition_label(c));
  for (Condition c : truth) t.push_back(condition_label(c));
  return confusion_metrics_signed(p, t);
}

std::string to_string(ClassifierKind k) {
  return k == ClassifierKind::Plsr ? "plsr" : "svm";
}

ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "plsr" || s == "PLSR") return ClassifierKind::Plsr;
  if (s == "svm" || s == "SVM") return ClassifierKind::Svm;
  throw ParameterError("unknown classifier '" + s + "' (expected plsr or svm)");
}

std::vector<int> stratified_folds(const std::vector<int>& y, int k,
                                  std::uint64_t seed) {
  if (k < 2) throw ParameterError("k must be >= 2");
  std::vector<long> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) {
    (y[i] > 0 ? pos : neg).push_back(static_cast<long>(i));
  }
  if (static_cast<int>(pos.size()) < k || static_cast<int>(neg.size()) < k) {
    throw ParameterError("need at least " + std::to_string(k) +
                         " samples per class for " + std::to_string(k) +
                         "-fold CV (" + std::to_string(pos.size()) + " / " +
                         std::to_string(neg.size()) + " present)");
  }

  std::vector<int> folds(y.size(), 0);
  Rng rng(mix_seed(seed, 0xf01d));
  for (std::vector<long>* cls : {&pos, &neg}) {
    deterministic_shuffle(*cls, rng);
    for (std::size_t i = 0; i < cls->size(); ++i) {
      folds[static_cast<std::size_t>((*cls)[i])] = static_cast<int>(i % k);
    }
  }
  return folds;
}

namespace {

Prediction fit_predict(ClassifierKind kind, const Hyperparams& hp,
                       const Eigen::MatrixXd& x_train,
                       const std::vector<int>& y_train,
                       const Eigen::MatrixXd& x_eval) {
  if (kind == ClassifierKind::Plsr) {
    return plsr_predict(plsr_fit(x_train, y_train, hp.n_components), x_eval);
  }
  return svm_predict(svm_fit(x_train, y_train, hp.sigma, hp.c), x_eval);
}

// True when a is preferred over b (higher accuracy, ties to smaller models).
bool better_entry(const CvEntry& a, const CvEntry& b) {
  if (a.mean_accuracy != b.mean_accuracy) {
    return a.mean_accuracy > b.mean_accuracy;
  }
  if (a.params.kind == ClassifierKind::Plsr) {
    return a.params.n_components < b.params.n_components;
  }
  if (a.params.sigma != b.params.sigma) return a.params.sigma > b.params.sigma;
  return a.params.c < b.params.c;
}

}  // namespace

CvResult kfold_cv(const Eigen::MatrixXd& X, const std::vector<int>& y, int k,
                  ClassifierKind kind, const HyperGrid& grid,
                  std::uint64_t seed) {
  if (X.rows() != static_cast<long>(y.size())) {
    throw ParameterError("label count does not match sample count");
  }
  const std::vector<int> folds = stratified_folds(y, k, seed);

  std::vector<Hyperparams> points;
  if (kind == ClassifierKind::Plsr) {
    std::vector<int> comps = grid.plsr_components;
    if (comps.empty()) {
      for (int h = 1; h <= std::min<long>(10, X.cols()); ++h) {
        comps.push_back(h);
      }
    }
    for (int h : comps) {
      Hyperparams hp;
      hp.kind = kind;
      hp.n_components = h;
      points.push_back(hp);
    }
  } else {
    for (double mult : grid.svm_sigma_mult) {
      for (double c : grid.svm_c) {
        Hyperparams hp;
        hp.kind = kind;
        hp.sigma = mult;  // scaled below
        hp.c = c;
        points.push_back(hp);
      }
    }
  }

  CvResult result;
  result.sigma_base = std::max(pooled_feature_sd(X), 1e-12);
  if (kind == ClassifierKind::Svm) {
    for (Hyperparams& hp : points) hp.sigma *= result.sigma_base;
  }

  // Precompute per-fold index lists.
  std::vector<std::vector<long>> train_rows(k), eval_rows(k);
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      (folds[i] == f ? eval_rows[f] : train_rows[f])
          .push_back(static_cast<long>(i));
    }
  }

  for (const Hyperparams& hp : points) {
    double acc_sum = 0.0;
    int evaluated = 0;
    for (int f = 0; f < k; ++f) {
      Eigen::MatrixXd x_train(train_rows[f].size(), X.cols());
      Eigen::MatrixXd x_eval(eval_rows[f].size(), X.cols());
      std::vector<int> y_train, y_eval;
      for (std::size_t r = 0; r < train_rows[f].size(); ++r) {
        x_train.row(static_cast<long>(r)) = X.row(train_rows[f][r]);
        y_train.push_back(y[static_cast<std::size_t>(train_rows[f][r])]);
      }
      for (std::size_t r = 0; r < eval_rows[f].size(); ++r) {
        x_eval.row(static_cast<long>(r)) = X.row(eval_rows[f][r]);
        y_eval.push_back(y[static_cast<std::size_t>(eval_rows[f][r])]);
      }
      Prediction pred;
      try {
        pred = fit_predict(kind, hp, x_train, y_train, x_eval);
      } catch (const ParameterError&) {
        continue;  // grid point infeasible for this fold (e.g. rank)
      }
      const EvalReport rep = confusion_metrics_signed(pred.labels, y_eval);
      acc_sum += rep.accuracy.value_or(0.0);
      ++evaluated;
    }
    CvEntry entry;
    entry.params = hp;
    entry.mean_accuracy = evaluated > 0 ? acc_sum / evaluated : 0.0;
    result.grid.push_back(entry);
  }

  if (result.grid.empty()) throw ParameterError("hyperparameter grid is empty");
  const CvEntry* best = &result.grid.front();
  for (const CvEntry& e : result.grid) {
    if (better_entry(e, *best)) best = &e;
  }
  result.best = best->params;
  result.best_accuracy = best->mean_accuracy;
  return result;
}

namespace {

// Runs fn(0..n-1) across hardware threads; results are written into
// caller-owned slots so the output order is independent of scheduling.
void parallel_for_ordered(long n, const std::function<void(long)>& fn) {
  const unsigned threads =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(n));
  if (threads <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.push_back(std::async(std::launch::async, [&]() {
      for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    }));
  }
  for (auto& w : workers) w.get();
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& X,
                            const std::vector<long>& rows) {
  Eigen::MatrixXd out(static_cast<long>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<long>(i)) = X.row(rows[i]);
  }
  return out;
}

// Feature matrix of a channel subset: horizontal concatenation.
Eigen::MatrixXd combine_channels(const FeatureDataset& ds,
                                 const std::vector<int>& channels) {
  const long dim = ds.feature_dim();
  Eigen::MatrixXd out(ds.epoch_count(),
                      dim * static_cast<long>(channels.size()));
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.middleCols(static_cast<long>(c) * dim, dim) =
        ds.per_channel[static_cast<std::size_t>(channels[c])];
  }
  return out;
}

struct EvaluatedCombo {
  Hyperparams params;
  double cv_accuracy = 0.0;
  EvalReport test;
};

EvaluatedCombo evaluate_feature_matrix(const Eigen::MatrixXd& X,
                                       const std::vector<int>& y,
                                       const std::vector<long>& train,
                                       const std::vector<long>& test,
                                       ClassifierKind kind,
                                       const SearchOptions& opts) {
  const Eigen::MatrixXd x_train = gather_rows(X, train);
  const Eigen::MatrixXd x_test = gather_rows(X, test);
  std::vector<int> y_train, y_test;
  for (long i : train) y_train.push_back(y[static_cast<std::size_t>(i)]);
  for (long i : test) y_test.push_back(y[static_cast<std::size_t>(i)]);

  const CvResult cv =
      kfold_cv(x_train, y_train, opts.k_fold, kind, opts.grid, opts.seed);
  const Prediction pred =
      fit_predict(kind, cv.best, x_train, y_train, x_test);

  EvaluatedCombo out;
  out.params = cv.best;
  out.cv_accuracy = cv.best_accuracy;
  out.test = confusion_metrics_signed(pred.labels, y_test);
  return out;
}

}  // namespace

const ComboResult& ChannelSearchResult::best() const {
  if (combos.empty()) throw ParameterError("no channel combinations evaluated");
  const ComboResult* best = &combos.front();
  for (const ComboResult& c : combos) {
    const double a = c.test.accuracy.value_or(0.0);
    const double b = best->test.accuracy.value_or(0.0);
    if (a > b || (a == b && c.channels.size() < best->channels.size())) {
      best = &c;
    }
  }
  return *best;
}

ChannelSearchResult channel_combination_search(const FeatureDataset& ds,
                                               ClassifierKind kind,
                                               const SearchOptions& opts) {
  const int n_channels = static_cast<int>(ds.per_channel.size());
  if (n_channels < 1) throw ParameterError("dataset has no channels");
  if (ds.train_idx.empty() || ds.test_idx.empty()) {
    throw ParameterError("dataset has an empty train or test split");
  }

  std::vector<int> y;
  y.reserve(ds.labels.size());
  for (Condition c : ds.labels) y.push_back(condition_label(c));

  ChannelSearchResult result;

  result.per_channel.resize(n_channels);
  parallel_for_ordered(n_channels, [&](long ch) {
    const EvaluatedCombo ev = evaluate_feature_matrix(
        ds.per_channel[static_cast<std::size_t>(ch)], y, ds.train_idx,
        ds.test_idx, kind, opts);
    ChannelScore& score = result.per_channel[static_cast<std::size_t>(ch)];
    score.channel = static_cast<int>(ch);
    score.name = ds.channels[static_cast<std::size_t>(ch)];
    score.params = ev.params;
    score.cv_accuracy = ev.cv_accuracy;
    score.test = ev.test;
  });

  result.ranking.resize(n_channels);
  std::iota(result.ranking.begin(), result.ranking.end(), 0);
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [&](int a, int b) {
                     const double aa =
                         result.per_channel[a].test.accuracy.value_or(0.0);
                     const double bb =
                         result.per_channel[b].test.accuracy.value_or(0.0);
                     return aa > bb;
                   });

  std::vector<std::vector<int>> combos;
  if (opts.strategy == SearchStrategy::RankedPrefix) {
    const int limit = opts.max_prefix > 0
                          ? std::min(opts.max_prefix, n_channels)
                          : n_channels;
    for (int m = 1; m <= limit; ++m) {
      combos.emplace_back(result.ranking.begin(), result.ranking.begin() + m);
    }
  } else {
    if (opts.exhaustive_k < 1 || opts.exhaustive_k > 4) {
      throw ParameterError("exhaustive search is guarded at subsets of size "
                           "1..4, got " +
                           std::to_string(opts.exhaustive_k));
    }
    // All subsets up to size k, ordered by size then lexicographically.
    std::vector<int> stack;
    std::function<void(int)> emit = [&](int start) {
      if (!stack.empty()) combos.push_back(stack);
      if (static_cast<int>(stack.size()) == opts.exhaustive_k) return;
      for (int ch = start; ch < n_channels; ++ch) {
        stack.push_back(ch);
        emit(ch + 1);
        stack.pop_back();
      }
    };
    emit(0);
    std::stable_sort(combos.begin(), combos.end(),
                     [](const std::vector<int>& a, const std::vector<int>& b) {
                       return a.size() < b.size();
                     });
  }

  result.combos.resize(combos.size());
  parallel_for_ordered(static_cast<long>(combos.size()), [&](long c) {
    const std::vector<int>& channels = combos[static_cast<std::size_t>(c)];
    const EvaluatedCombo ev = evaluate_feature_matrix(
        combine_channels(ds, channels), y, ds.train_idx, ds.test_idx, kind,
        opts);
    ComboResult& combo = result.combos[static_cast<std::size_t>(c)];
    combo.channels = channels;
    for (int ch : channels) {
      combo.names.push_back(ds.channels[static_cast<std::size_t>(ch)]);
    }
    combo.params = ev.params;
    combo.cv_accuracy = ev.cv_accuracy;
    combo.test = ev.test;
  });
  return result;
}

}  // namespace eegpipe
