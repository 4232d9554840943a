#pragma once

// Bilinear alignment similarity sim_M(A, B) = <M, G_AB>, where
// G_AB = A^T Y_AB B / t_AB is fixed once the alignment Y_AB is known.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "slts/align.hpp"
#include "slts/parallel.hpp"

namespace slts {

/// Square, finite d x d matrix parameterizing the similarity. Neither
/// symmetry nor positive semi-definiteness is required.
class MetricMatrix {
 public:
  MetricMatrix() = default;

  explicit MetricMatrix(Matrix entries) : entries_(std::move(entries)) {
    detail::require(entries_.rows() == entries_.cols() && entries_.rows() >= 1,
                    ErrorCode::DimMismatch, "metric matrix must be square and non-empty");
    detail::require(entries_.allFinite(), ErrorCode::NonFinite, "metric matrix has non-finite entries");
  }

  static MetricMatrix identity(Index d) { return MetricMatrix(Matrix::Identity(d, d)); }
  static MetricMatrix zero(Index d) { return MetricMatrix(Matrix::Zero(d, d)); }

  const Matrix& entries() const noexcept { return entries_; }
  Index dim() const noexcept { return entries_.rows(); }
  double frobenius_norm() const { return entries_.norm(); }

 private:
  Matrix entries_;
};

/// How alignments are chosen. FixedIdentity aligns under M = I once and
/// keeps that alignment while M changes.
enum class AlignmentPolicy { FixedIdentity };

inline std::string to_string(AlignmentPolicy) { return "fixed_identity"; }

inline AlignmentPolicy alignment_policy_from_string(const std::string& s) {
  detail::require(s == "fixed_identity", ErrorCode::ParseError, "unknown alignment policy '" + s + "'");
  return AlignmentPolicy::FixedIdentity;
}

/// sum_ij x_ij * y_ij in a fixed column-major order, so that every caller
/// computing a similarity gets bit-identical results.
inline double frobenius_inner(const Matrix& x, const Matrix& y) {
  double s = 0.0;
  const double* px = x.data();
  const double* py = y.data();
  for (Index k = 0; k < x.size(); ++k) s += px[k] * py[k];
  return s;
}

struct AlignmentFeature {
  Matrix g;  ///< A^T Y B / t_AB
  Index path_length = 0;
};

/// Sum over aligned pairs of a_i b_j^T, without the 1/t_AB factor.
inline Matrix aligned_outer_sum(const TimeSeries& a, const TimeSeries& b, const Alignment& alignment) {
  Matrix s = Matrix::Zero(a.dim(), b.dim());
  for (auto [i, j] : alignment.path) s.noalias() += a.values().row(i).transpose() * b.values().row(j);
  return s;
}

inline AlignmentFeature alignment_feature(const TimeSeries& a, const TimeSeries& b,
                                          AlignmentPolicy policy = AlignmentPolicy::FixedIdentity) {
  (void)policy;
  detail::require(a.dim() == b.dim(), ErrorCode::DimMismatch,
                  "series '" + a.id() + "' and '" + b.id() + "' differ in dimension");
  const Alignment alignment = dtw_align(affinity_matrix(a, b, Matrix::Identity(a.dim(), a.dim())));
  AlignmentFeature out;
  out.path_length = alignment.length();
  out.g = aligned_outer_sum(a, b, alignment) / static_cast<double>(out.path_length);
  return out;
}

/// Metric + landmarks + hyperparameters; maps a series to its landmark features.
struct SimilarityModel {
  MetricMatrix metric;
  std::vector<LabeledSeries> landmarks;
  double gamma = 1.0;
  double lambda = 1.0;
  AlignmentPolicy policy = AlignmentPolicy::FixedIdentity;

  Index dim() const noexcept { return metric.dim(); }

  void validate() const {
    detail::require(!landmarks.empty(), ErrorCode::EmptyLandmarks, "similarity model has no landmarks");
    detail::require(gamma > 0 && lambda > 0, ErrorCode::NonPositiveInput, "gamma and lambda must be positive");
    for (const auto& l : landmarks)
      detail::require(l.series.dim() == metric.dim(), ErrorCode::DimMismatch,
                      "landmark '" + l.series.id() + "' does not match the metric dimension");
  }
};

inline double similarity(const TimeSeries& a, const TimeSeries& b, const MetricMatrix& metric,
                         AlignmentPolicy policy = AlignmentPolicy::FixedIdentity) {
  detail::require(a.dim() == metric.dim() && b.dim() == metric.dim(), ErrorCode::DimMismatch,
                  "series and metric dimensions differ");
  return frobenius_inner(metric.entries(), alignment_feature(a, b, policy).g);
}

inline double similarity(const TimeSeries& a, const TimeSeries& b, const SimilarityModel& model) {
  return similarity(a, b, model.metric, model.policy);
}

/// Alignment features of every (row series, landmark) pair. Alignments do
/// not depend on M under FixedIdentity, so one table serves every metric.
class FeatureTable {
 public:
  FeatureTable() = default;

  FeatureTable(const std::vector<const TimeSeries*>& rows, const std::vector<const TimeSeries*>& landmarks,
               AlignmentPolicy policy = AlignmentPolicy::FixedIdentity)
      : rows_(rows.size()), cols_(landmarks.size()), g_(rows.size() * landmarks.size()) {
    parallel_for(g_.size(), [&](std::size_t k) {
      g_[k] = alignment_feature(*rows[k / cols_], *landmarks[k % cols_], policy).g;
    });
  }

  static FeatureTable build(const Dataset& ds, const std::vector<LabeledSeries>& landmarks,
                            AlignmentPolicy policy = AlignmentPolicy::FixedIdentity) {
    std::vector<const TimeSeries*> rows, cols;
    for (const auto& item : ds.items()) rows.push_back(&item.series);
    for (const auto& l : landmarks) cols.push_back(&l.series);
    return FeatureTable(rows, cols, policy);
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const Matrix& at(std::size_t row, std::size_t landmark) const { return g_[row * cols_ + landmark]; }

  /// Phi(i, j) = <M, G_ij> for the selected rows (all rows if empty).
  Matrix features(const MetricMatrix& metric, const std::vector<std::size_t>& row_subset = {}) const {
    const std::size_t m = row_subset.empty() ? rows_ : row_subset.size();
    Matrix phi(static_cast<Index>(m), static_cast<Index>(cols_));
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t row = row_subset.empty() ? r : row_subset[r];
      for (std::size_t j = 0; j < cols_; ++j)
        phi(static_cast<Index>(r), static_cast<Index>(j)) = frobenius_inner(metric.entries(), at(row, j));
    }
    return phi;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Matrix> g_;
};

/// phi_j(X) = sim_M(X, landmark_j), in landmark order.
inline Vector feature_map(const TimeSeries& x, const SimilarityModel& model) {
  detail::require(x.dim() == model.dim(), ErrorCode::DimMismatch,
                  "series '" + x.id() + "' has d=" + std::to_string(x.dim()) + ", model has d=" +
                      std::to_string(model.dim()));
  Vector phi(static_cast<Index>(model.landmarks.size()));
  for (std::size_t j = 0; j < model.landmarks.size(); ++j)
    phi(static_cast<Index>(j)) = similarity(x, model.landmarks[j].series, model);
  return phi;
}

/// Row i is feature_map(item_i).
inline Matrix feature_matrix(const Dataset& ds, const SimilarityModel& model) {
  detail::require(ds.empty() || ds.dim() == model.dim(), ErrorCode::DimMismatch,
                  "dataset has d=" + std::to_string(ds.dim()) + ", model has d=" + std::to_string(model.dim()));
  return FeatureTable::build(ds, model.landmarks, model.policy).features(model.metric);
}

}  // namespace slts
