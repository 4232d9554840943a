#pragma once

// One-vs-rest wrapper: one (metric, separator) pair per class, argmax decision.

#include <string>
#include <vector>

#include "slts/classifier.hpp"

namespace slts {

struct BinaryModel {
  SimilarityModel similarity;
  Separator separator;
};

struct OvrModel {
  std::vector<std::string> classes;
  std::vector<BinaryModel> models;  ///< parallel to `classes`

  Index dim() const { return models.empty() ? 0 : models.front().similarity.dim(); }
};

/// Hyperparameters and switches for fitting binary subproblems.
struct FitOptions {
  SolverOptions solver;
  bool learn_metric = true;  ///< false: keep M = I (the BBS baseline)
};

/// Result of one binary subproblem fit on cached alignment features.
struct BinaryFit {
  MetricMatrix metric;
  Separator separator;
  SolverReport report;  ///< empty when the metric was not learned
};

/// Fits one class-vs-rest subproblem on the selected rows of `table`.
inline BinaryFit fit_binary(const FeatureTable& table, const std::vector<std::size_t>& rows,
                            const std::vector<int>& row_signs, const std::vector<int>& landmark_signs,
                            double gamma, double lambda, const FitOptions& opts) {
  BinaryFit fit;
  const Index d = table.at(0, 0).rows();
  if (opts.learn_metric) {
    const SltsProblem problem = build_problem(table, row_signs, landmark_signs, gamma, lambda, rows);
    MetricFit mf = learn_metric(problem, opts.solver);
    fit.metric = std::move(mf.metric);
    fit.report = std::move(mf.report);
  } else {
    fit.metric = MetricMatrix::identity(d);
  }
  fit.separator = learn_separator(table.features(fit.metric, rows), row_signs, gamma, opts.solver);
  return fit;
}

/// Fits every class on the selected rows. `row_labels` is parallel to `rows`.
inline std::vector<BinaryFit> fit_ovr(const FeatureTable& table, const std::vector<std::size_t>& rows,
                                      const std::vector<std::string>& row_labels,
                                      const std::vector<std::string>& classes,
                                      const std::vector<std::string>& landmark_labels, double gamma,
                                      double lambda, const FitOptions& opts) {
  std::vector<BinaryFit> fits(classes.size());
  parallel_for(classes.size(), [&](std::size_t c) {
    fits[c] = fit_binary(table, rows, one_vs_rest_signs(row_labels, classes[c]),
                         one_vs_rest_signs(landmark_labels, classes[c]), gamma, lambda, opts);
  });
  return fits;
}

/// Argmax over per-class scores; the first class wins ties.
inline std::size_t argmax_class(const Vector& scores) {
  std::size_t best = 0;
  for (Index c = 1; c < scores.size(); ++c)
    if (scores(c) > scores(static_cast<Index>(best))) best = static_cast<std::size_t>(c);
  return best;
}

/// scores(r, c) = <alpha_c, Phi_c(row r)>.
inline Matrix ovr_scores(const FeatureTable& table, const std::vector<std::size_t>& rows,
                         const std::vector<BinaryFit>& fits) {
  const std::size_t m = rows.empty() ? table.rows() : rows.size();
  Matrix scores(static_cast<Index>(m), static_cast<Index>(fits.size()));
  for (std::size_t c = 0; c < fits.size(); ++c)
    scores.col(static_cast<Index>(c)) = table.features(fits[c].metric, rows) * fits[c].separator.alpha;
  return scores;
}

inline OvrModel make_ovr_model(const std::vector<std::string>& classes, std::vector<BinaryFit> fits,
                               const std::vector<LabeledSeries>& landmarks, double gamma, double lambda) {
  OvrModel model;
  model.classes = classes;
  for (auto& fit : fits) {
    SimilarityModel sm{std::move(fit.metric), landmarks, gamma, lambda, AlignmentPolicy::FixedIdentity};
    model.models.push_back({std::move(sm), std::move(fit.separator)});
  }
  return model;
}

inline void validate(const OvrModel& model) {
  detail::require(!model.classes.empty() && model.classes.size() == model.models.size(),
                  ErrorCode::InvalidArgument, "model needs one binary model per class");
  for (const auto& bm : model.models) {
    bm.similarity.validate();
    detail::require(static_cast<std::size_t>(bm.separator.alpha.size()) == bm.similarity.landmarks.size(),
                    ErrorCode::DimMismatch, "separator length differs from landmark count");
    detail::require(bm.similarity.dim() == model.dim(), ErrorCode::DimMismatch,
                    "binary models disagree on the dimension");
  }
}

/// Raw binary score of every class for every item of `ds` (rows = items).
inline Matrix ovr_scores(const OvrModel& model, const Dataset& ds) {
  validate(model);
  detail::require(ds.empty() || ds.dim() == model.dim(), ErrorCode::DimMismatch,
                  "data has d=" + std::to_string(ds.dim()) + ", model has d=" + std::to_string(model.dim()));
  Matrix scores(static_cast<Index>(ds.size()), static_cast<Index>(model.classes.size()));
  bool shared = true;
  for (const auto& bm : model.models)
    shared = shared && bm.similarity.landmarks == model.models.front().similarity.landmarks;
  if (shared) {
    const FeatureTable table = FeatureTable::build(ds, model.models.front().similarity.landmarks);
    for (std::size_t c = 0; c < model.models.size(); ++c)
      scores.col(static_cast<Index>(c)) =
          table.features(model.models[c].similarity.metric) * model.models[c].separator.alpha;
    return scores;
  }
  for (std::size_t c = 0; c < model.models.size(); ++c)
    scores.col(static_cast<Index>(c)) =
        feature_matrix(ds, model.models[c].similarity) * model.models[c].separator.alpha;
  return scores;
}

inline Vector ovr_scores(const OvrModel& model, const TimeSeries& x) {
  validate(model);
  detail::require(x.dim() == model.dim(), ErrorCode::DimMismatch,
                  "series '" + x.id() + "' has d=" + std::to_string(x.dim()) + ", model has d=" +
                      std::to_string(model.dim()));
  Vector scores(static_cast<Index>(model.classes.size()));
  for (std::size_t c = 0; c < model.models.size(); ++c)
    scores(static_cast<Index>(c)) =
        predict_binary(model.models[c].separator, feature_map(x, model.models[c].similarity)).score;
  return scores;
}

inline std::string ovr_predict(const OvrModel& model, const TimeSeries& x) {
  return model.classes[argmax_class(ovr_scores(model, x))];
}

inline std::vector<std::string> ovr_predict(const OvrModel& model, const Dataset& ds) {
  const Matrix scores = ovr_scores(model, ds);
  std::vector<std::string> out;
  out.reserve(ds.size());
  for (Index r = 0; r < scores.rows(); ++r) out.push_back(model.classes[argmax_class(scores.row(r).transpose())]);
  return out;
}

}  // namespace slts
