#pragma once

// DTW over an affinity matrix: finds the monotone warping path that MAXIMIZES
// the cumulative affinity. Also hosts an exhaustive reference aligner.

#include <array>
#include <limits>
#include <utility>
#include <vector>

#include "slts/core.hpp"

namespace slts {

/// A warping path between series A (rows of C) and B (columns of C).
/// Indices are 0-based; the path runs from (0, 0) to (t_A - 1, t_B - 1).
struct Alignment {
  std::vector<std::pair<Index, Index>> path;
  double raw_score = 0.0;

  Index length() const noexcept { return static_cast<Index>(path.size()); }
};

/// C(i, j) = a_i^T M b_j.
inline Matrix affinity_matrix(const TimeSeries& a, const TimeSeries& b, const Matrix& metric) {
  detail::require(a.dim() == b.dim() && metric.rows() == a.dim() && metric.cols() == a.dim(),
                  ErrorCode::DimMismatch,
                  "affinity needs matching dimensions (A: " + std::to_string(a.dim()) +
                      ", B: " + std::to_string(b.dim()) + ", M: " + std::to_string(metric.rows()) +
                      "x" + std::to_string(metric.cols()) + ")");
  return a.values() * metric * b.values().transpose();
}

namespace detail {

// Backtracking preference when predecessor scores tie.
inline constexpr std::array<std::pair<Index, Index>, 3> kMoves{{{1, 1}, {1, 0}, {0, 1}}};

inline void require_affinity(const Matrix& c) {
  require(c.rows() >= 1 && c.cols() >= 1, ErrorCode::InvalidArgument, "affinity matrix is empty");
  require(c.allFinite(), ErrorCode::NonFinite, "affinity matrix contains non-finite values");
}

}  // namespace detail

/// O(t_A * t_B) dynamic program. Ties during backtracking prefer the
/// diagonal predecessor, then (i - 1, j), then (i, j - 1).
inline Alignment dtw_align(const Matrix& c) {
  detail::require_affinity(c);
  const Index ta = c.rows();
  const Index tb = c.cols();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  Matrix acc(ta, tb);
  for (Index i = 0; i < ta; ++i) {
    for (Index j = 0; j < tb; ++j) {
      if (i == 0 && j == 0) {
        acc(i, j) = c(i, j);
        continue;
      }
      double best = kNegInf;
      if (i > 0 && j > 0) best = acc(i - 1, j - 1);
      if (i > 0) best = std::max(best, acc(i - 1, j));
      if (j > 0) best = std::max(best, acc(i, j - 1));
      acc(i, j) = c(i, j) + best;
    }
  }

  Alignment out;
  out.raw_score = acc(ta - 1, tb - 1);
  Index i = ta - 1;
  Index j = tb - 1;
  out.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    double best = kNegInf;
    std::pair<Index, Index> next{-1, -1};
    for (auto [di, dj] : detail::kMoves) {
      const Index pi = i - di;
      const Index pj = j - dj;
      if (pi < 0 || pj < 0) continue;
      if (acc(pi, pj) > best) {
        best = acc(pi, pj);
        next = {pi, pj};
      }
    }
    i = next.first;
    j = next.second;
    out.path.emplace_back(i, j);
  }
  std::reverse(out.path.begin(), out.path.end());
  return out;
}

inline constexpr Index kBruteForceMaxLength = 10;

/// Enumerates every monotone path. Among paths with the best score it returns
/// the one dtw_align would backtrack: compared from the end, diagonal moves
/// win over (i - 1, j), which win over (i, j - 1).
inline Alignment brute_force_align(const Matrix& c) {
  detail::require_affinity(c);
  detail::require(c.rows() <= kBruteForceMaxLength && c.cols() <= kBruteForceMaxLength,
                  ErrorCode::TooLarge, "exhaustive alignment is limited to 10x10 matrices");
  const Index ta = c.rows();
  const Index tb = c.cols();

  // Paths are grown backwards from the end so that the move sequence
  // compares lexicographically in backtracking order.
  Alignment best;
  bool have_best = false;
  std::vector<std::pair<Index, Index>> reversed{{ta - 1, tb - 1}};
  std::vector<int> moves;
  std::vector<int> best_moves;

  auto score_of = [&](const std::vector<std::pair<Index, Index>>& rev) {
    double s = 0.0;
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) s += c(it->first, it->second);
    return s;
  };

  auto visit = [&](auto&& self, Index i, Index j) -> void {
    if (i == 0 && j == 0) {
      const double s = score_of(reversed);
      // Enumeration order already visits move sequences lexicographically,
      // so only a strictly better score replaces the incumbent.
      if (!have_best || s > best.raw_score) {
        have_best = true;
        best.raw_score = s;
        best.path.assign(reversed.rbegin(), reversed.rend());
        best_moves = moves;
      }
      return;
    }
    for (int m = 0; m < 3; ++m) {
      const Index pi = i - detail::kMoves[m].first;
      const Index pj = j - detail::kMoves[m].second;
      if (pi < 0 || pj < 0) continue;
      reversed.emplace_back(pi, pj);
      moves.push_back(m);
      self(self, pi, pj);
      moves.pop_back();
      reversed.pop_back();
    }
  };
  visit(visit, ta - 1, tb - 1);
  return best;
}

/// Checks endpoints, step set and t_AB >= max(t_A, t_B).
inline bool is_valid_alignment(const Alignment& a, Index ta, Index tb) {
  if (a.path.empty()) return false;
  if (a.path.front() != std::pair<Index, Index>{0, 0}) return false;
  if (a.path.back() != std::pair<Index, Index>{ta - 1, tb - 1}) return false;
  for (std::size_t k = 1; k < a.path.size(); ++k) {
    const Index di = a.path[k].first - a.path[k - 1].first;
    const Index dj = a.path[k].second - a.path[k - 1].second;
    const bool ok = (di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1);
    if (!ok) return false;
  }
  return a.length() >= std::max(ta, tb);
}

/// Sum of C along the path, accumulated in path order.
inline double path_score(const Matrix& c, const Alignment& a) {
  double s = 0.0;
  for (auto [i, j] : a.path) s += c(i, j);
  return s;
}

}  // namespace slts
