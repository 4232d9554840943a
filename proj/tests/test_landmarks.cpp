#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "helpers.hpp"

using namespace slts;
using slts::testing::rows;

namespace {

void expect_distinct_in_range(const LandmarkSet& s, std::size_t n, std::size_t m) {
  ASSERT_EQ(s.size(), n);
  std::set<std::size_t> seen(s.indices.begin(), s.indices.end());
  EXPECT_EQ(seen.size(), n);
  EXPECT_LT(*seen.rbegin(), m);
}

/// Two tight clusters {0, 1, 2} and {3, 4, 5} with some spread inside each.
Matrix two_clusters() {
  Matrix d(6, 6);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) d(i, j) = (i < 3) == (j < 3) ? 0.05 * static_cast<double>(1 + (i + j) % 3) : 1.8;
  d.diagonal().setZero();
  return d;
}

}  // namespace

TEST(Random, Examples) {
  const LandmarkSet all = select_random(10, 10, 3);
  std::vector<std::size_t> sorted = all.indices;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expected(10);
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  EXPECT_EQ(sorted, expected);
  EXPECT_EQ(select_random(50, 7, 9).indices, select_random(50, 7, 9).indices);
  expect_distinct_in_range(select_random(10, 1, 4), 1, 10);
  EXPECT_NE(select_random(50, 7, 9).indices, select_random(50, 7, 10).indices);
}

TEST(Random, CountOutOfRange) {
  for (std::size_t n : {std::size_t{0}, std::size_t{11}}) {
    try {
      select_random(10, n, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::CountOutOfRange);
    }
  }
}

TEST(KMedoids, EveryPointIsAMedoid) {
  const Matrix d = two_clusters();
  const LandmarkSet s = select_kmedoids(d, 6, 1);
  EXPECT_EQ(s.indices, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(medoid_cost(d, s.indices), 0.0);
}

TEST(KMedoids, MatchesExhaustiveSearch) {
  const Matrix d = two_clusters();
  const auto best = oracle::exhaustive_pam(d, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LandmarkSet s = select_kmedoids(d, 2, seed);
    EXPECT_NEAR(medoid_cost(d, s.indices), best.cost, 1e-12);
    EXPECT_TRUE((s.indices[0] < 3) != (s.indices[1] < 3));
  }
}

TEST(KMedoids, RandomInstancesMatchExhaustiveOnSeriesData) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 5; ++k) {
    const Dataset ds = slts::testing::random_dataset(rng, 9, 3, 3, 6, {"a"});
    const Matrix d = dissimilarity_from_similarity(pairwise_similarity(ds));
    const LandmarkSet s = select_kmedoids(ds, 3, static_cast<std::uint64_t>(k));
    // PAM is a local search; it must at least not be worse than its start.
    const auto start = detail::draw_without_replacement(9, 3, static_cast<std::uint64_t>(k));
    EXPECT_LE(medoid_cost(d, s.indices), medoid_cost(d, start) + 1e-12);
    EXPECT_GE(medoid_cost(d, s.indices), oracle::exhaustive_pam(d, 3).cost - 1e-12);
    EXPECT_TRUE(std::is_sorted(s.indices.begin(), s.indices.end()));
  }
}

TEST(KMedoids, IdenticalPointsTieToLowerIndex) {
  const Matrix d = rows({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}});
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    EXPECT_EQ(select_kmedoids(d, 1, seed).indices, (std::vector<std::size_t>{0}));
}

TEST(DSelect, PicksTheOrthogonalPoint) {
  // sim(p1, p2) = 0.9, sim(p1, p3) = 0.
  const Matrix s = rows({{1.0, 0.9, 0.0}, {0.9, 1.0, 0.4}, {0.0, 0.4, 1.0}});
  std::uint64_t seed = 0;
  while (true) {
    std::mt19937_64 rng(seed);
    if (detail::uniform_index(rng, 3) == 0) break;
    ++seed;
  }
  const LandmarkSet one = select_dselect(s, 1, seed);
  EXPECT_EQ(one.indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(select_dselect(s, 2, seed).indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(select_dselect(s, 3, seed).indices, (std::vector<std::size_t>{0, 2, 1}));
}

TEST(DSelect, EachStepIsMinimalSum) {
  std::mt19937_64 rng(22);
  const Dataset ds = slts::testing::random_dataset(rng, 15, 3, 3, 7, {"a"});
  const Matrix s = pairwise_similarity(ds);
  const LandmarkSet set = select_dselect(s, 8, 5);
  expect_distinct_in_range(set, 8, 15);
  for (std::size_t k = 1; k < set.size(); ++k) {
    auto sum = [&](std::size_t p) {
      double t = 0;
      for (std::size_t q = 0; q < k; ++q) t += s(static_cast<Index>(p), static_cast<Index>(set.indices[q]));
      return t;
    };
    for (std::size_t p = 0; p < 15; ++p) {
      if (std::find(set.indices.begin(), set.indices.begin() + static_cast<long>(k), p) !=
          set.indices.begin() + static_cast<long>(k))
        continue;
      EXPECT_LE(sum(set.indices[k]), sum(p) + 1e-12);
    }
  }
}

TEST(Pairwise, SymmetricAndIgnoresLabels) {
  std::mt19937_64 rng(23);
  Dataset a = slts::testing::random_dataset(rng, 8, 2, 3, 6, {"x", "y"});
  Dataset b;
  for (const auto& item : a.items()) b.add({item.series, "z"});
  const Matrix s = pairwise_similarity(a);
  EXPECT_EQ(s, s.transpose());
  EXPECT_EQ(s, pairwise_similarity(b));
  for (auto method : {LandmarkMethod::Random, LandmarkMethod::KMedoids, LandmarkMethod::DSelect})
    EXPECT_EQ(select_landmarks(a, method, 3, 4).indices, select_landmarks(b, method, 3, 4).indices);
}

TEST(Methods, Strings) {
  for (auto method : {LandmarkMethod::Random, LandmarkMethod::KMedoids, LandmarkMethod::DSelect})
    EXPECT_EQ(landmark_method_from_string(to_string(method)), method);
  EXPECT_THROW(landmark_method_from_string("best"), Error);
}
