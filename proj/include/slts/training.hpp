#pragma once

// End-to-end one-vs-rest training: grid search, then a final fit on the
// whole training set with the selected (gamma, lambda).

#include <cstdint>
#include <vector>

#include "slts/eval.hpp"
#include "slts/landmarks.hpp"

namespace slts {

struct TrainOptions {
  Grid grid;
  FitOptions fit;
  std::uint64_t seed = 0;  ///< drives the validation split
};

struct OvrTraining {
  OvrModel model;
  CvResult cv;
  std::vector<SolverReport> reports;  ///< per class; empty reports when M is not learned
};

inline OvrTraining ovr_train(const Dataset& train, const std::vector<LabeledSeries>& landmarks,
                             const TrainOptions& opts) {
  detail::require(!train.empty(), ErrorCode::EmptyDataset, "training set is empty");
  detail::require(train.classes().size() >= 2, ErrorCode::SingleClass, "one-vs-rest needs at least two classes");
  detail::require(!landmarks.empty(), ErrorCode::EmptyLandmarks, "no landmarks given");
  for (const auto& l : landmarks)
    detail::require(l.series.dim() == train.dim(), ErrorCode::DimMismatch,
                    "landmark '" + l.series.id() + "' does not match the training dimension");

  std::vector<std::string> landmark_labels;
  for (const auto& l : landmarks) landmark_labels.push_back(l.label);
  const FeatureTable table = FeatureTable::build(train, landmarks);
  const auto labels = train.labels();

  OvrTraining out;
  out.cv = cross_validate(table, labels, train.classes(), landmark_labels, opts.grid, opts.seed, opts.fit);
  auto fits = fit_ovr(table, {}, labels, train.classes(), landmark_labels, out.cv.best_gamma, out.cv.best_lambda,
                      opts.fit);
  for (const auto& f : fits) out.reports.push_back(f.report);
  out.model = make_ovr_model(train.classes(), std::move(fits), landmarks, out.cv.best_gamma, out.cv.best_lambda);
  return out;
}

inline OvrTraining ovr_train(const Dataset& train, const LandmarkSet& landmarks, const TrainOptions& opts) {
  return ovr_train(train, landmark_series(train, landmarks), opts);
}

}  // namespace slts
