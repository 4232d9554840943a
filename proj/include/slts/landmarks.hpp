#pragma once

// Landmark selection: Random, KMedoids (PAM swaps on 1 - sim_I) and DSelect
// (greedy least-similar). Labels are never used.

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "slts/sim.hpp"

namespace slts {

enum class LandmarkMethod { Random, KMedoids, DSelect };

inline std::string to_string(LandmarkMethod m) {
  switch (m) {
    case LandmarkMethod::Random: return "random";
    case LandmarkMethod::KMedoids: return "kmedoids";
    case LandmarkMethod::DSelect: return "dselect";
  }
  return "random";
}

inline LandmarkMethod landmark_method_from_string(const std::string& s) {
  if (s == "random") return LandmarkMethod::Random;
  if (s == "kmedoids") return LandmarkMethod::KMedoids;
  if (s == "dselect") return LandmarkMethod::DSelect;
  detail::fail(ErrorCode::InvalidArgument, "unknown landmark method '" + s + "'");
}

struct LandmarkSet {
  std::vector<std::size_t> indices;  ///< positions in the training set
  LandmarkMethod method = LandmarkMethod::Random;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return indices.size(); }
};

namespace detail {

inline void require_count(std::size_t n, std::size_t m) {
  require(n >= 1 && n <= m, ErrorCode::CountOutOfRange,
          "landmark count " + std::to_string(n) + " outside [1, " + std::to_string(m) + "]");
}

/// n distinct indices from [0, m) by partial Fisher-Yates, in draw order.
inline std::vector<std::size_t> draw_without_replacement(std::size_t m, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> pool(m);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < n; ++k) std::swap(pool[k], pool[k + uniform_index(rng, m - k)]);
  pool.resize(n);
  return pool;
}

}  // namespace detail

/// S(i, j) = sim_I(x_i, x_j). Computed for i <= j and mirrored, so S is
/// exactly symmetric.
inline Matrix pairwise_similarity(const Dataset& ds) {
  const std::size_t m = ds.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) pairs.emplace_back(i, j);
  std::vector<double> values(pairs.size());
  const MetricMatrix identity = MetricMatrix::identity(ds.dim());
  parallel_for(pairs.size(), [&](std::size_t k) {
    values[k] = similarity(ds[pairs[k].first].series, ds[pairs[k].second].series, identity);
  });
  Matrix s(static_cast<Index>(m), static_cast<Index>(m));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto i = static_cast<Index>(pairs[k].first);
    const auto j = static_cast<Index>(pairs[k].second);
    s(i, j) = s(j, i) = values[k];
  }
  return s;
}

/// 1 - S off the diagonal, 0 on it (a medoid costs nothing to itself).
inline Matrix dissimilarity_from_similarity(const Matrix& s) {
  Matrix d = Matrix::Ones(s.rows(), s.cols()) - s;
  d.diagonal().setZero();
  return d;
}

/// Sum over points of the dissimilarity to the closest medoid.
inline double medoid_cost(const Matrix& dissimilarity, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (Index p = 0; p < dissimilarity.rows(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t q : medoids) best = std::min(best, dissimilarity(p, static_cast<Index>(q)));
    total += best;
  }
  return total;
}

inline LandmarkSet select_random(std::size_t m, std::size_t n, std::uint64_t seed) {
  detail::require_count(n, m);
  return {detail::draw_without_replacement(m, n, seed), LandmarkMethod::Random, seed};
}

inline LandmarkSet select_random(const Dataset& train, std::size_t n, std::uint64_t seed) {
  return select_random(train.size(), n, seed);
}

inline constexpr int kMaxSwapRounds = 100;

/// PAM from a seeded random start: each round applies the single best
/// improving (medoid, non-medoid) swap. A final pass moves each medoid to
/// the lowest index that gives the same cost. Indices come back ascending.
inline LandmarkSet select_kmedoids(const Matrix& dissimilarity, std::size_t n, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(dissimilarity.rows());
  detail::require_count(n, m);
  std::vector<std::size_t> medoids = detail::draw_without_replacement(m, n, seed);
  double cost = medoid_cost(dissimilarity, medoids);

  auto is_medoid = [&](std::size_t p) { return std::find(medoids.begin(), medoids.end(), p) != medoids.end(); };

  for (int round = 0; round < kMaxSwapRounds; ++round) {
    double best_cost = cost;
    std::size_t best_slot = 0, best_point = 0;
    bool found = false;
    for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
      for (std::size_t p = 0; p < m; ++p) {
        if (is_medoid(p)) continue;
        auto trial = medoids;
        trial[slot] = p;
        const double c = medoid_cost(dissimilarity, trial);
        if (c < best_cost - 1e-12) {
          best_cost = c;
          best_slot = slot;
          best_point = p;
          found = true;
        }
      }
    }
    if (!found) break;
    medoids[best_slot] = best_point;
    cost = best_cost;
  }

  for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
    for (std::size_t p = 0; p < medoids[slot]; ++p) {
      if (is_medoid(p)) continue;
      auto trial = medoids;
      trial[slot] = p;
      if (medoid_cost(dissimilarity, trial) <= cost + 1e-12) {
        medoids[slot] = p;
        break;
      }
    }
  }
  std::sort(medoids.begin(), medoids.end());
  return {medoids, LandmarkMethod::KMedoids, seed};
}

inline LandmarkSet select_kmedoids(const Dataset& train, std::size_t n, std::uint64_t seed) {
  detail::require_count(n, train.size());
  return select_kmedoids(dissimilarity_from_similarity(pairwise_similarity(train)), n, seed);
}

/// Seeded random first pick, then repeatedly the remaining point with the
/// smallest summed similarity to those already chosen (lowest index on ties).
inline LandmarkSet select_dselect(const Matrix& sim, std::size_t n, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(sim.rows());
  detail::require_count(n, m);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen{detail::uniform_index(rng, m)};
  std::vector<bool> taken(m, false);
  taken[chosen.front()] = true;
  std::vector<double> sum(m, 0.0);
  while (chosen.size() < n) {
    const auto last = static_cast<Index>(chosen.back());
    for (std::size_t p = 0; p < m; ++p) sum[p] += sim(static_cast<Index>(p), last);
    std::size_t pick = m;
    for (std::size_t p = 0; p < m; ++p)
      if (!taken[p] && (pick == m || sum[p] < sum[pick])) pick = p;
    chosen.push_back(pick);
    taken[pick] = true;
  }
  return {chosen, LandmarkMethod::DSelect, seed};
}

inline LandmarkSet select_dselect(const Dataset& train, std::size_t n, std::uint64_t seed) {
  detail::require_count(n, train.size());
  return select_dselect(pairwise_similarity(train), n, seed);
}

inline LandmarkSet select_landmarks(const Dataset& train, LandmarkMethod method, std::size_t n,
                                    std::uint64_t seed) {
  switch (method) {
    case LandmarkMethod::Random: return select_random(train, n, seed);
    case LandmarkMethod::KMedoids: return select_kmedoids(train, n, seed);
    case LandmarkMethod::DSelect: return select_dselect(train, n, seed);
  }
  return select_random(train, n, seed);
}

inline std::vector<LabeledSeries> landmark_series(const Dataset& train, const LandmarkSet& set) {
  std::vector<LabeledSeries> out;
  out.reserve(set.size());
  for (std::size_t i : set.indices) {
    detail::require(i < train.size(), ErrorCode::CountOutOfRange, "landmark index out of range");
    out.push_back(train[i]);
  }
  return out;
}

}  // namespace slts
