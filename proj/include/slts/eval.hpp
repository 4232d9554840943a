#pragma once

// Evaluation: accuracy, 1NN baseline, grid cross-validation, theoretical
// bound calculators and checks, PCA of the similarity space.

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slts/ovr.hpp"

namespace slts {

inline double accuracy(const std::vector<std::string>& predicted, const std::vector<std::string>& truth) {
  detail::require(predicted.size() == truth.size(), ErrorCode::LengthMismatch,
                  "predictions and truth differ in length");
  detail::require(!truth.empty(), ErrorCode::Empty, "accuracy of an empty prediction set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

/// Label of the training item most similar to x under `metric` (lowest
/// index on ties).
inline std::string nn1_classify(const Dataset& train, const TimeSeries& x, const MetricMatrix& metric) {
  detail::require(!train.empty(), ErrorCode::Empty, "1NN needs a non-empty training set");
  std::size_t best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double s = similarity(x, train[i].series, metric);
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  return train[best].label;
}

// ---------------------------------------------------------------------------
// Hyperparameter search

struct Grid {
  std::vector<double> gammas{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> lambdas{0.1, 1.0, 10.0};
  double validation_fraction = 0.3;

  void validate() const {
    detail::require(!gammas.empty() && !lambdas.empty(), ErrorCode::InvalidArgument, "grid must be non-empty");
    for (double g : gammas) detail::require(g > 0, ErrorCode::NonPositiveInput, "gamma grid must be positive");
    for (double l : lambdas) detail::require(l > 0, ErrorCode::NonPositiveInput, "lambda grid must be positive");
    detail::require(validation_fraction > 0 && validation_fraction < 1, ErrorCode::InvalidArgument,
                    "validation fraction must lie in (0, 1)");
  }
};

struct CvEntry {
  double gamma = 0.0;
  double lambda = 0.0;
  double accuracy = 0.0;
};

struct CvResult {
  double best_gamma = 0.0;
  double best_lambda = 0.0;
  std::vector<CvEntry> table;  ///< grid order: gammas outer, lambdas inner
  int split_attempts = 1;
};

inline constexpr int kMaxSplitRedraws = 10;

/// Holds out a stratified validation fraction, redrawing (seed + k) while a
/// class is missing from it. After kMaxSplitRedraws the last draw is used.
inline SplitIndices validation_split(const std::vector<std::string>& labels, const std::vector<std::string>& classes,
                                     double validation_fraction, std::uint64_t seed, int* attempts = nullptr) {
  SplitIndices split;
  int k = 0;
  for (; k < kMaxSplitRedraws; ++k) {
    split = stratified_split_indices(labels, 1.0 - validation_fraction, seed + static_cast<std::uint64_t>(k));
    bool complete = !split.test.empty();
    for (const auto& c : classes) {
      bool seen = false;
      for (std::size_t i : split.test) seen = seen || labels[i] == c;
      complete = complete && seen;
    }
    if (complete) break;
  }
  if (attempts) *attempts = std::min(k + 1, kMaxSplitRedraws);
  return split;
}

/// Grid search on cached features. Ties go to the larger gamma, then the
/// larger lambda (the more regularized candidate). Without metric learning
/// only the first lambda is evaluated.
inline CvResult cross_validate(const FeatureTable& table, const std::vector<std::string>& labels,
                               const std::vector<std::string>& classes,
                               const std::vector<std::string>& landmark_labels, const Grid& grid,
                               std::uint64_t seed, const FitOptions& opts) {
  grid.validate();
  detail::require(!labels.empty(), ErrorCode::EmptyDataset, "cross-validation on an empty dataset");
  detail::require(classes.size() >= 2, ErrorCode::SingleClass, "cross-validation needs at least two classes");

  CvResult result;
  const SplitIndices split = validation_split(labels, classes, grid.validation_fraction, seed, &result.split_attempts);
  detail::require(!split.test.empty() && !split.train.empty(), ErrorCode::EmptyDataset,
                  "too few items for a validation split");
  std::vector<std::string> fit_labels, val_labels;
  for (std::size_t i : split.train) fit_labels.push_back(labels[i]);
  for (std::size_t i : split.test) val_labels.push_back(labels[i]);

  const std::vector<double> lambdas =
      opts.learn_metric ? grid.lambdas : std::vector<double>{grid.lambdas.front()};
  for (double g : grid.gammas)
    for (double l : lambdas) result.table.push_back({g, l, 0.0});

  parallel_for(result.table.size(), [&](std::size_t k) {
    auto& entry = result.table[k];
    const auto fits =
        fit_ovr(table, split.train, fit_labels, classes, landmark_labels, entry.gamma, entry.lambda, opts);
    const Matrix scores = ovr_scores(table, split.test, fits);
    std::vector<std::string> predicted;
    for (Index r = 0; r < scores.rows(); ++r) predicted.push_back(classes[argmax_class(scores.row(r).transpose())]);
    entry.accuracy = accuracy(predicted, val_labels);
  });

  const CvEntry* best = &result.table.front();
  for (const auto& e : result.table) {
    const bool better = e.accuracy > best->accuracy ||
                        (e.accuracy == best->accuracy &&
                         (e.gamma > best->gamma || (e.gamma == best->gamma && e.lambda > best->lambda)));
    if (better) best = &e;
  }
  result.best_gamma = best->gamma;
  result.best_lambda = best->lambda;
  return result;
}

inline CvResult cross_validate(const Dataset& train, const std::vector<LabeledSeries>& landmarks, const Grid& grid,
                               std::uint64_t seed, const FitOptions& opts = {}) {
  detail::require(!train.empty(), ErrorCode::EmptyDataset, "cross-validation on an empty dataset");
  detail::require(!landmarks.empty(), ErrorCode::EmptyLandmarks, "no landmarks given");
  std::vector<std::string> landmark_labels;
  for (const auto& l : landmarks) landmark_labels.push_back(l.label);
  return cross_validate(FeatureTable::build(train, landmarks), train.labels(), train.classes(), landmark_labels, grid,
                        seed, opts);
}

// ---------------------------------------------------------------------------
// Theoretical quantities

struct LandmarkCount {
  std::size_t value = 0;
  bool condition_holds = true;  ///< delta < gamma * epsilon1 / 4
};

/// (2/tau) (log(2/delta) + 16 log(2/delta) / (epsilon1 gamma)^2), rounded up.
inline LandmarkCount landmark_count_bound(double epsilon1, double gamma, double delta, double tau) {
  detail::require(epsilon1 > 0 && gamma > 0 && delta > 0 && tau > 0, ErrorCode::NonPositiveInput,
                  "landmark count bound needs positive inputs");
  const double log_term = std::log(2.0 / delta);
  const double eg = epsilon1 * gamma;
  const double raw = (2.0 / tau) * (log_term + 16.0 * log_term / (eg * eg));
  // Absorbs rounding in log() so that exact integers are not bumped up.
  const double value = std::ceil(raw * (1.0 - 1e-12));
  return {static_cast<std::size_t>(value), delta < eg / 4.0};
}

/// kappa = 4d / (gamma^2 lambda): the uniform stability constant.
inline double stability_constant(Index d, double gamma, double lambda) {
  return 4.0 * static_cast<double>(d) / (gamma * gamma * lambda);
}

/// 4d/(g^2 l m) + (4d/(g^2 l) + (1/g) sqrt(2d/l)) sqrt(2 log(2/delta) / m)
inline double generalization_bound_rhs(Index d, double gamma, double lambda, std::size_t m, double delta) {
  detail::require(d > 0 && gamma > 0 && lambda > 0 && m > 0 && delta > 0, ErrorCode::NonPositiveInput,
                  "bound needs positive inputs");
  detail::require(delta < 1, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  const double dd = static_cast<double>(d);
  const double mm = static_cast<double>(m);
  const double kappa = stability_constant(d, gamma, lambda);
  return kappa / mm + (kappa + std::sqrt(2.0 * dd / lambda) / gamma) * std::sqrt(2.0 * std::log(2.0 / delta) / mm);
}

struct BoundReport {
  double empirical_risk = 0.0;  ///< mean loss on the training problem
  double holdout_risk = 0.0;    ///< mean loss on a disjoint sample, estimating the true risk
  double rhs = 0.0;             ///< generalization_bound_rhs
  double loss_cap = 0.0;        ///< sqrt(2d)/(gamma sqrt(lambda))
  double delta = 0.05;
  bool holds = false;           ///< holdout_risk <= empirical_risk + rhs
};

inline BoundReport bound_report(const MetricMatrix& metric, const SltsProblem& train, const SltsProblem& holdout,
                                double delta = 0.05) {
  detail::require(!train.h.empty() && !holdout.h.empty(), ErrorCode::EmptyDataset,
                  "bound report needs non-empty train and holdout problems");
  BoundReport r;
  r.delta = delta;
  r.empirical_risk = empirical_risk(metric, train);
  r.holdout_risk = empirical_risk(metric, holdout);
  r.rhs = generalization_bound_rhs(train.dim, train.gamma, train.lambda, train.size(), delta);
  r.loss_cap = loss_bound(train.dim, train.gamma, train.lambda);
  r.holds = r.holdout_risk <= r.empirical_risk + r.rhs;
  return r;
}

struct StabilityCheck {
  bool asserted = false;  ///< both runs converged, so the comparison is meaningful
  bool holds = true;
  double max_difference = 0.0;
  double kappa_over_m = 0.0;
};

/// Trains on `base` and on `base` with example `replaced` swapped for
/// `replacement`, then compares the losses of both metrics on `probes`.
inline StabilityCheck stability_spot_check(const SltsProblem& base, std::size_t replaced, const Matrix& replacement,
                                           const std::vector<Matrix>& probes, const SolverOptions& opts = {}) {
  detail::require(replaced < base.size(), ErrorCode::CountOutOfRange, "replaced index out of range");
  SltsProblem swapped = base;
  swapped.h[replaced] = replacement;
  const MetricFit a = learn_metric(base, opts);
  const MetricFit b = learn_metric(swapped, opts);
  StabilityCheck out;
  out.kappa_over_m = stability_constant(base.dim, base.gamma, base.lambda) / static_cast<double>(base.size());
  for (const auto& h : probes)
    out.max_difference = std::max(out.max_difference, std::abs(example_loss(a.metric, h) - example_loss(b.metric, h)));
  out.asserted = a.report.converged && b.report.converged;
  out.holds = !out.asserted || out.max_difference <= out.kappa_over_m;
  return out;
}

// ---------------------------------------------------------------------------
// PCA of the similarity space

struct PcaResult {
  Matrix coordinates;  ///< m x 2
  Matrix components;   ///< n x 2, unit columns
  double explained[2] = {0.0, 0.0};
};

/// Top two principal components of the column-centered rows. Each
/// component's largest-magnitude loading is made positive.
inline PcaResult pca_project(const Matrix& phi) {
  detail::require(phi.rows() >= 2, ErrorCode::TooFewRows, "PCA needs at least two rows");
  detail::require(phi.cols() >= 1, ErrorCode::DimMismatch, "PCA needs at least one column");
  detail::require(phi.allFinite(), ErrorCode::NonFinite, "PCA input has non-finite entries");
  const Matrix centered = phi.rowwise() - phi.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(phi.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  detail::require(eig.info() == Eigen::Success, ErrorCode::NonFinite, "eigen-decomposition failed");

  const Index n = phi.cols();
  const double total = cov.trace();
  PcaResult out;
  out.components = Matrix::Zero(n, 2);
  for (Index k = 0; k < std::min<Index>(2, n); ++k) {
    const Index idx = n - 1 - k;  // eigenvalues come back ascending
    Vector v = eig.eigenvectors().col(idx);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.components.col(k) = v;
    out.explained[k] = total > 0 ? std::max(0.0, eig.eigenvalues()(idx)) / total : 0.0;
  }
  out.coordinates = centered * out.components;
  return out;
}

// ---------------------------------------------------------------------------
// Reports

struct ClassBounds {
  std::string label;
  BoundReport bounds;
};

struct EvalReport {
  std::vector<std::string> classes;
  double accuracy = 0.0;
  std::vector<std::size_t> class_totals;
  std::vector<std::size_t> class_correct;
  std::vector<std::vector<std::size_t>> confusion;  ///< [truth][predicted]
  double mean_hinge_loss = 0.0;  ///< mean of [1 - l score]_+ over items and classes
  std::vector<ClassBounds> bounds;  ///< filled when training data is supplied
  std::optional<double> nn1_accuracy;

  std::optional<double> class_accuracy(std::size_t c) const {
    if (class_totals[c] == 0) return std::nullopt;
    return static_cast<double>(class_correct[c]) / static_cast<double>(class_totals[c]);
  }
};

inline std::vector<std::string> landmark_labels_of(const SimilarityModel& sm) {
  std::vector<std::string> out;
  for (const auto& l : sm.landmarks) out.push_back(l.label);
  return out;
}

/// Accuracy, confusion and classifier hinge loss of `model` on `test`. When
/// `train` is given, also the per-class risk bound check and 1NN accuracy.
inline EvalReport evaluate(const OvrModel& model, const Dataset& test, const Dataset* train = nullptr,
                           double delta = 0.05) {
  detail::require(!test.empty(), ErrorCode::EmptyDataset, "evaluation set is empty");
  const Matrix scores = ovr_scores(model, test);
  const std::size_t k = model.classes.size();

  EvalReport r;
  r.classes = model.classes;
  r.class_totals.assign(k, 0);
  r.class_correct.assign(k, 0);
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::vector<std::string> predicted;
  double hinge = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto truth_it = std::find(model.classes.begin(), model.classes.end(), test[i].label);
    detail::require(truth_it != model.classes.end(), ErrorCode::InvalidArgument,
                    "label '" + test[i].label + "' was not seen in training");
    const auto truth = static_cast<std::size_t>(truth_it - model.classes.begin());
    const std::size_t pred = argmax_class(scores.row(static_cast<Index>(i)).transpose());
    predicted.push_back(model.classes[pred]);
    ++r.class_totals[truth];
    ++r.confusion[truth][pred];
    if (pred == truth) ++r.class_correct[truth];
    for (std::size_t c = 0; c < k; ++c) {
      const double l = c == truth ? 1.0 : -1.0;
      hinge += std::max(0.0, 1.0 - l * scores(static_cast<Index>(i), static_cast<Index>(c)));
    }
  }
  r.accuracy = accuracy(predicted, test.labels());
  r.mean_hinge_loss = hinge / static_cast<double>(test.size() * k);

  if (train != nullptr && !train->empty()) {
    const auto& sm0 = model.models.front().similarity;
    const FeatureTable train_table = FeatureTable::build(*train, sm0.landmarks);
    const FeatureTable test_table = FeatureTable::build(test, sm0.landmarks);
    for (std::size_t c = 0; c < k; ++c) {
      const auto& sm = model.models[c].similarity;
      const auto lsigns = one_vs_rest_signs(landmark_labels_of(sm), model.classes[c]);
      const auto tr = build_problem(train_table, one_vs_rest_signs(train->labels(), model.classes[c]), lsigns,
                                    sm.gamma, sm.lambda);
      const auto ho = build_problem(test_table, one_vs_rest_signs(test.labels(), model.classes[c]), lsigns,
                                    sm.gamma, sm.lambda);
      r.bounds.push_back({model.classes[c], bound_report(sm.metric, tr, ho, delta)});
    }
    std::vector<std::string> nn;
    const MetricMatrix identity = MetricMatrix::identity(test.dim());
    for (const auto& item : test.items()) nn.push_back(nn1_classify(*train, item.series, identity));
    r.nn1_accuracy = accuracy(nn, test.labels());
  }
  return r;
}

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;  ///< 1.96 * sd / sqrt(k)
};

inline ConfidenceInterval confidence_interval(const std::vector<double>& values) {
  detail::require(!values.empty(), ErrorCode::Empty, "no values");
  const double k = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= k;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, 1.96 * std::sqrt(ss / (k - 1.0)) / std::sqrt(k)};
}

}  // namespace slts
