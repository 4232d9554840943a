#pragma once

// Landmark-space linear separator: minimize sum_i [1 - l_i <alpha, phi_i>]_+
// subject to ||alpha||_1 <= 1/gamma, and its sign predictor.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "slts/metric_learning.hpp"

namespace slts {

/// Euclidean projection onto {x : ||x||_1 <= radius} by soft-thresholding
/// at the threshold found from the sorted magnitudes.
inline Vector project_l1_ball(const Vector& v, double radius) {
  detail::require(radius > 0, ErrorCode::NonPositiveInput, "radius must be positive");
  detail::require(v.allFinite(), ErrorCode::NonFinite, "vector has non-finite entries");
  if (v.lpNorm<1>() <= radius) return v;

  std::vector<double> mags(static_cast<std::size_t>(v.size()));
  for (Index k = 0; k < v.size(); ++k) mags[static_cast<std::size_t>(k)] = std::abs(v(k));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] - candidate > 0) theta = candidate;
  }
  Vector out(v.size());
  for (Index k = 0; k < v.size(); ++k) {
    const double shrunk = std::max(0.0, std::abs(v(k)) - theta);
    out(k) = v(k) < 0 ? -shrunk : shrunk;
  }
  return out;
}

struct Separator {
  Vector alpha;
  double gamma = 1.0;

  double budget() const { return 1.0 / gamma; }
};

/// Total hinge loss of alpha on rows of phi.
inline double separator_loss(const Vector& alpha, const Matrix& phi, const std::vector<int>& signs) {
  double s = 0.0;
  for (Index i = 0; i < phi.rows(); ++i)
    s += std::max(0.0, 1.0 - signs[static_cast<std::size_t>(i)] * phi.row(i).dot(alpha));
  return s;
}

/// Projected subgradient with normalized steps step0 * R / (||g|| sqrt(t)),
/// R = 1/gamma, projecting onto the L1 ball after each step and keeping the
/// best iterate.
inline Separator learn_separator(const Matrix& phi, const std::vector<int>& signs, double gamma,
                                 const SolverOptions& opts = {}) {
  opts.validate();
  detail::require(gamma > 0, ErrorCode::NonPositiveInput, "gamma must be positive");
  detail::require(phi.rows() >= 1 && phi.cols() >= 1, ErrorCode::DimMismatch, "feature matrix is empty");
  detail::require(static_cast<Index>(signs.size()) == phi.rows(), ErrorCode::DimMismatch,
                  "need one sign per feature row");
  detail::require(phi.allFinite(), ErrorCode::NonFinite, "feature matrix has non-finite entries");

  const double radius = 1.0 / gamma;
  Vector alpha = Vector::Zero(phi.cols());
  Vector best = alpha;
  double best_loss = separator_loss(alpha, phi, signs);

  for (int t = 1; t <= opts.max_iters && best_loss > 0.0; ++t) {
    Vector g = Vector::Zero(phi.cols());
    for (Index i = 0; i < phi.rows(); ++i) {
      const double l = signs[static_cast<std::size_t>(i)];
      if (l * phi.row(i).dot(alpha) < 1.0) g -= l * phi.row(i).transpose();
    }
    const double gnorm = g.norm();
    if (gnorm == 0.0) break;
    const double step = opts.step0 * radius / (gnorm * std::sqrt(static_cast<double>(t)));
    alpha = project_l1_ball(alpha - step * g, radius);
    const double loss = separator_loss(alpha, phi, signs);
    if (loss < best_loss) {
      best_loss = loss;
      best = alpha;
    }
  }
  return {best, gamma};
}

struct BinaryPrediction {
  int sign = 1;
  double score = 0.0;
};

/// score = <alpha, phi>; sign(0) = +1.
inline BinaryPrediction predict_binary(const Separator& sep, const Vector& phi) {
  detail::require(phi.size() == sep.alpha.size(), ErrorCode::DimMismatch,
                  "feature vector has " + std::to_string(phi.size()) + " entries, separator has " +
                      std::to_string(sep.alpha.size()));
  const double score = sep.alpha.dot(phi);
  return {score >= 0.0 ? 1 : -1, score};
}

}  // namespace slts
