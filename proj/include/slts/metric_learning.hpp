#pragma once

// SLTS: learns the metric M by minimizing
//   (1/m) sum_i [1 - <M, H_i>]_+ + lambda ||M||_F^2,
// with H_i = (1/(n gamma)) sum_j l_i l'_j G_ij.

#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "slts/sim.hpp"

namespace slts {

struct SltsProblem {
  std::vector<Matrix> h;  ///< one aggregated d x d coefficient per training example
  double gamma = 1.0;
  double lambda = 1.0;
  Index dim = 0;

  std::size_t size() const noexcept { return h.size(); }
};

struct SolverOptions {
  int max_iters = 5000;
  double rel_tol = 1e-7;
  double step0 = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(max_iters >= 1, ErrorCode::InvalidArgument, "max_iters must be >= 1");
    detail::require(rel_tol > 0, ErrorCode::InvalidArgument, "rel_tol must be positive");
    detail::require(step0 > 0, ErrorCode::InvalidArgument, "step0 must be positive");
  }
};

/// sqrt(2d) / (gamma sqrt(lambda)): the per-example loss cap at the optimum.
inline double loss_bound(Index d, double gamma, double lambda) {
  return std::sqrt(2.0 * static_cast<double>(d)) / (gamma * std::sqrt(lambda));
}

/// 1 / sqrt(lambda): the Frobenius norm cap on the optimal metric.
inline double metric_norm_bound(double lambda) { return 1.0 / std::sqrt(lambda); }

/// sqrt(2d) / gamma: Lipschitz constant of the per-example loss in M.
inline double loss_lipschitz(Index d, double gamma) { return std::sqrt(2.0 * static_cast<double>(d)) / gamma; }

/// Assembles H_i for the selected rows of `table` (all rows if `rows` is empty).
inline SltsProblem build_problem(const FeatureTable& table, const std::vector<int>& example_signs,
                                 const std::vector<int>& landmark_signs, double gamma, double lambda,
                                 const std::vector<std::size_t>& rows = {}) {
  detail::require(gamma > 0 && lambda > 0, ErrorCode::NonPositiveInput, "gamma and lambda must be positive");
  detail::require(table.cols() >= 1 && landmark_signs.size() == table.cols(), ErrorCode::EmptyLandmarks,
                  "need one sign per landmark and at least one landmark");
  const std::size_t m = rows.empty() ? table.rows() : rows.size();
  detail::require(example_signs.size() == m, ErrorCode::LengthMismatch, "need one sign per example");

  SltsProblem p;
  p.gamma = gamma;
  p.lambda = lambda;
  const double scale = 1.0 / (static_cast<double>(table.cols()) * gamma);
  p.h.reserve(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t row = rows.empty() ? r : rows[r];
    Matrix h = Matrix::Zero(table.at(row, 0).rows(), table.at(row, 0).cols());
    for (std::size_t j = 0; j < table.cols(); ++j)
      h += static_cast<double>(example_signs[r] * landmark_signs[j]) * table.at(row, j);
    p.h.push_back(scale * h);
  }
  p.dim = p.h.empty() ? table.at(0, 0).rows() : p.h.front().rows();
  return p;
}

inline SltsProblem build_problem(const Dataset& train, const std::vector<int>& example_signs,
                                 const std::vector<LabeledSeries>& landmarks, const std::vector<int>& landmark_signs,
                                 double gamma, double lambda) {
  detail::require(!landmarks.empty(), ErrorCode::EmptyLandmarks, "no landmarks given");
  for (const auto& l : landmarks)
    detail::require(train.empty() || l.series.dim() == train.dim(), ErrorCode::DimMismatch,
                    "landmark '" + l.series.id() + "' does not match the training dimension");
  return build_problem(FeatureTable::build(train, landmarks), example_signs, landmark_signs, gamma, lambda);
}

namespace detail {
inline void require_metric_dim(const Matrix& m, const SltsProblem& p) {
  require(m.rows() == p.dim && m.cols() == p.dim, ErrorCode::DimMismatch,
          "metric is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", problem has d=" +
              std::to_string(p.dim));
}
}  // namespace detail

/// [1 - <M, H>]_+
inline double example_loss(const MetricMatrix& metric, const Matrix& h) {
  detail::require(h.rows() == metric.dim() && h.cols() == metric.dim(), ErrorCode::DimMismatch,
                  "coefficient and metric dimensions differ");
  return std::max(0.0, 1.0 - frobenius_inner(metric.entries(), h));
}

/// Mean example loss, without the regularizer.
inline double empirical_risk(const MetricMatrix& metric, const SltsProblem& p) {
  detail::require_metric_dim(metric.entries(), p);
  if (p.h.empty()) return 0.0;
  double s = 0.0;
  for (const auto& h : p.h) s += example_loss(metric, h);
  return s / static_cast<double>(p.h.size());
}

inline double objective(const MetricMatrix& metric, const SltsProblem& p) {
  return empirical_risk(metric, p) + p.lambda * metric.entries().squaredNorm();
}

/// -(1/m) sum_{i: <M,H_i> < 1} H_i + 2 lambda M. Hinges exactly at the kink
/// contribute nothing.
inline Matrix subgradient(const MetricMatrix& metric, const SltsProblem& p) {
  detail::require_metric_dim(metric.entries(), p);
  Matrix g = Matrix::Zero(p.dim, p.dim);
  for (const auto& h : p.h)
    if (frobenius_inner(metric.entries(), h) < 1.0) g -= h;
  if (!p.h.empty()) g /= static_cast<double>(p.h.size());
  g += 2.0 * p.lambda * metric.entries();
  return g;
}

struct SolverReport {
  int iterations = 0;
  double final_objective = 0.0;
  double best_objective = 0.0;
  bool converged = false;
  double metric_norm = 0.0;
  double max_example_loss = 0.0;
  bool norm_bound_holds = false;  ///< ||M||_F <= 1/sqrt(lambda) + 1e-6
  bool loss_bound_holds = false;  ///< max loss <= sqrt(2d)/(gamma sqrt(lambda))
  std::vector<double> best_trace;  ///< best objective after each iteration (index 0 = M0)
};

struct MetricFit {
  MetricMatrix metric;
  SolverReport report;
};

inline constexpr int kConvergenceWindow = 10;

/// Full-batch subgradient descent from M = 0 with step step0 / (lambda t),
/// keeping the best iterate. Stops once the best objective moved by less
/// than rel_tol (relative) over the last 10 iterations while the current
/// iterate is no worse than the best was at the start of that window. The
/// second condition keeps early overshooting iterates (large H, small
/// lambda) from being mistaken for a stall at M = 0.
inline MetricFit learn_metric(const SltsProblem& p, const SolverOptions& opts = {}) {
  opts.validate();
  detail::require(p.dim >= 1, ErrorCode::InvalidArgument, "problem has no dimension");
  detail::require(p.lambda > 0 && p.gamma > 0, ErrorCode::NonPositiveInput, "gamma and lambda must be positive");

  MetricMatrix current = MetricMatrix::zero(p.dim);
  MetricMatrix best = current;
  double best_obj = objective(current, p);
  double current_obj = best_obj;

  SolverReport report;
  report.best_trace.push_back(best_obj);
  for (int t = 1; t <= opts.max_iters; ++t) {
    const double step = opts.step0 / (p.lambda * static_cast<double>(t));
    current = MetricMatrix(current.entries() - step * subgradient(current, p));
    current_obj = objective(current, p);
    if (current_obj < best_obj) {
      best_obj = current_obj;
      best = current;
    }
    report.best_trace.push_back(best_obj);
    report.iterations = t;
    if (t >= kConvergenceWindow) {
      const double before = report.best_trace[static_cast<std::size_t>(t - kConvergenceWindow)];
      if ((before - best_obj) <= opts.rel_tol * std::abs(before) && current_obj <= before) {
        report.converged = true;
        break;
      }
    }
  }

  report.final_objective = current_obj;
  report.best_objective = best_obj;
  report.metric_norm = best.frobenius_norm();
  for (const auto& h : p.h) report.max_example_loss = std::max(report.max_example_loss, example_loss(best, h));
  report.norm_bound_holds = report.metric_norm <= metric_norm_bound(p.lambda) + 1e-6;
  report.loss_bound_holds = report.max_example_loss <= loss_bound(p.dim, p.gamma, p.lambda);
  return {best, std::move(report)};
}

}  // namespace slts
