#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eegpipe/core.hpp"
#include "eegpipe/features.hpp"

namespace eegpipe {

// Labels are +1 for the 2D class (the positive class) and -1 for 3D.
inline int condition_label(Condition c) {
  return c == Condition::TwoD ? +1 : -1;
}

struct PlsrModel {
  int n_components = 0;
  Eigen::MatrixXd weights;     // p x H
  Eigen::MatrixXd loadings;    // p x H
  Eigen::VectorXd y_loadings;  // H
  Eigen::VectorXd beta;        // p, for centered inputs
  Eigen::VectorXd x_mean;      // p
  double intercept = 0.0;      // mean of y
};

// NIPALS extraction of latent components for a single +-1 response.
PlsrModel plsr_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   int n_components);

struct Prediction {
  Eigen::VectorXd scores;   // decision values
  std::vector<int> labels;  // sign of score, ties toward +1
};

Prediction plsr_predict(const PlsrModel& model, const Eigen::MatrixXd& X);

// exp(-|x - y|^2 / (2 sigma^2))
double rbf_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                  double sigma);

struct SvmModel {
  Eigen::MatrixXd support_vectors;  // m x p
  Eigen::VectorXd dual_coef;        // alpha_i * y_i
  double bias = 0.0;
  double sigma = 1.0;
  double c = 1.0;
  long iterations = 0;
  double kkt_gap = 0.0;

  double dual_sum() const;  // sum alpha_i y_i, ~0 by the equality constraint
};

struct SvmOptions {
  double tol = 1e-3;    // maximal-violating-pair gap at convergence
  long max_iter = 200000;
};

// Soft-margin dual solved by pairwise coordinate ascent on the maximal
// violating pair until the KKT gap drops below tol.
SvmModel svm_fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                 double sigma, double c, const SvmOptions& opts = {});

Prediction svm_predict(const SvmModel& model, const Eigen::MatrixXd& X);

// Confusion counts with 2D positive; ratios with zero denominators are
// reported as absent rather than zero.
struct EvalReport {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> accuracy;
  std::optional<double> sensitivity;  // TP / (TP + FN)
  std::optional<double> specificity;  // TN / (TN + FP)
};

EvalReport confusion_metrics(const std::vector<Condition>& predicted,
                             const std::vector<Condition>& truth);
EvalReport confusion_metrics_signed(const std::vector<int>& predicted,
                                    const std::vector<int>& truth);

enum class ClassifierKind { Plsr, Svm };

std::string to_string(ClassifierKind k);
ClassifierKind classifier_kind_from_string(const std::string& s);

struct Hyperparams {
  ClassifierKind kind = ClassifierKind::Svm;
  int n_components = 1;  // PLSR
  double sigma = 1.0;    // SVM
  double c = 1.0;        // SVM
};

struct HyperGrid {
  std::vector<int> plsr_components;  // empty: 1..min(10, p)
  std::vector<double> svm_sigma_mult{0.1, 0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<double> svm_c{0.1, 1.0, 10.0, 100.0};
};

struct CvEntry {
  Hyperparams params;
  double mean_accuracy = 0.0;
};

struct CvResult {
  std::vector<CvEntry> grid;
  Hyperparams best;
  double best_accuracy = 0.0;
  double sigma_base = 0.0;  // pooled feature SD the sigma grid is scaled by
};

// Stratified fold assignment (one fold id per sample); per-class sizes
// differ by at most one across folds.
std::vector<int> stratified_folds(const std::vector<int>& y, int k,
                                  std::uint64_t seed);

// Grid search by stratified K-fold mean accuracy. Ties prefer the smaller
// model: fewer PLSR components, larger sigma then smaller C for the SVM.
CvResult kfold_cv(const Eigen::MatrixXd& X, const std::vector<int>& y, int k,
                  ClassifierKind kind, const HyperGrid& grid,
                  std::uint64_t seed);

enum class SearchStrategy { RankedPrefix, ExhaustiveK };

struct SearchOptions {
  SearchStrategy strategy = SearchStrategy::RankedPrefix;
  int exhaustive_k = 2;  // ExhaustiveK only; guarded at 4
  int k_fold = 10;
  HyperGrid grid;
  std::uint64_t seed = 0;
  int max_prefix = 0;  // 0: up to all channels
};

struct ChannelScore {
  int channel = 0;
  std::string name;
  Hyperparams params;
  double cv_accuracy = 0.0;
  EvalReport test;
};

struct ComboResult {
  std::vector<int> channels;
  std::vector<std::string> names;
  Hyperparams params;
  double cv_accuracy = 0.0;
  EvalReport test;
};

struct ChannelSearchResult {
  std::vector<ChannelScore> per_channel;  // montage order
  std::vector<int> ranking;               // channel indices, best first
  std::vector<ComboResult> combos;

  const ComboResult& best() const;
};

// Ranks channels by single-channel test accuracy, then evaluates channel
// combinations per the chosen strategy (top-M prefixes by default).
ChannelSearchResult channel_combination_search(const FeatureDataset& ds,
                                               ClassifierKind kind,
                                               const SearchOptions& opts = {});

}  // namespace eegpipe
