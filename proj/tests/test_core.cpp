#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "helpers.hpp"

using namespace slts;
using slts::testing::rows;

TEST(TimeSeries, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(TimeSeries("a", Matrix(0, 2)), Error);
  Matrix bad = rows({{1, 0}});
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    TimeSeries("a", bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(Normalize, UnitRows) {
  const TimeSeries s = normalize_series(rows({{3, 4}, {0, 2}}), "a");
  EXPECT_NEAR(s.values()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(s.values()(0, 1), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(s.values()(1, 1), 1.0);
  EXPECT_TRUE(s.has_unit_rows());
}

TEST(Normalize, ZeroRowIsAnError) {
  try {
    normalize_series(rows({{1, 0}, {0, 0}}), "a");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroTimeStep);
  }
}

TEST(Normalize, Idempotent) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Matrix raw = oracle::random_matrix(rng, 7, 3, 5.0);
    const TimeSeries once = normalize_series(raw, "x");
    const TimeSeries twice = normalize_series(once);
    EXPECT_LE((once.values() - twice.values()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Dataset, EnforcesDimensionAndLabels) {
  Dataset ds;
  ds.add({slts::testing::series({{1, 0}}), "a"});
  EXPECT_THROW(ds.add({slts::testing::series({{1, 0, 0}}), "a"}), Error);
  EXPECT_THROW(ds.add({slts::testing::series({{1, 0}}), ""}), Error);
  ds.add({slts::testing::series({{0, 1}}), "b"});
  ds.add({slts::testing::series({{0, 1}}), "a"});
  EXPECT_EQ(ds.classes(), (std::vector<std::string>{"a", "b"}));
}

TEST(Dataset, OneVsRestSigns) {
  EXPECT_EQ(one_vs_rest_signs({"a", "b", "a", "c"}, "a"), (std::vector<int>{1, -1, 1, -1}));
}

TEST(Load, DimensionMismatchReportsLine) {
  std::istringstream in(R"({"id":"a","label":"x","values":[[1,0],[0,1]]}
{"id":"b","label":"y","values":[[1,0,0]]}
)");
  try {
    read_dataset(in, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Load, MalformedLineIsParseError) {
  std::istringstream in("{\"id\":\"a\",\"label\":\"x\",\"values\":[[1,0]]}\nnot json\n");
  try {
    read_dataset(in, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Load, RaggedRowsRejected) {
  std::istringstream in(R"({"id":"a","label":"x","values":[[1,0],[1]]})");
  EXPECT_THROW(read_dataset(in, false), Error);
}

TEST(Load, EmptyInputGivesEmptyDataset) {
  std::istringstream in("\n  \n");
  EXPECT_TRUE(read_dataset(in, false).empty());
}

TEST(Load, MissingFileIsIoError) {
  try {
    load_dataset("/nonexistent/data.jsonl", false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Load, NormalizeOnLoad) {
  std::istringstream in(R"({"id":"a","label":"x","values":[[3,4]]})");
  const Dataset ds = read_dataset(in, true);
  EXPECT_NEAR(ds[0].series.values()(0, 1), 0.8, 1e-15);
}

TEST(Load, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  Dataset ds;
  for (int i = 0; i < 20; ++i)
    ds.add({TimeSeries("id" + std::to_string(i), oracle::random_matrix(rng, 1 + i % 5, 3, 1e3)), i % 3 ? "p" : "q"});
  std::stringstream buf;
  write_dataset(buf, ds);
  const Dataset back = read_dataset(buf, false);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back[i], ds[i]);
    EXPECT_EQ(std::memcmp(back[i].series.values().data(), ds[i].series.values().data(),
                          sizeof(double) * static_cast<std::size_t>(ds[i].series.values().size())),
              0);
  }
}

TEST(Split, SevenThreeOnTen) {
  std::vector<std::string> labels(10, "a");
  const auto split = stratified_split_indices(labels, 0.7, 1);
  EXPECT_EQ(split.train.size(), 7u);
  EXPECT_EQ(split.test.size(), 3u);
}

TEST(Split, PartitionsAndStratifies) {
  std::vector<std::string> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 3 == 0 ? "a" : "b");
  const auto split = stratified_split_indices(labels, 0.7, 5);
  std::set<std::size_t> all(split.train.begin(), split.train.end());
  for (std::size_t i : split.test) EXPECT_TRUE(all.insert(i).second);
  EXPECT_EQ(all.size(), labels.size());
  std::size_t train_a = 0;
  for (std::size_t i : split.train) train_a += labels[i] == "a";
  EXPECT_EQ(train_a, 7u);
  EXPECT_TRUE(std::is_sorted(split.train.begin(), split.train.end()));
}

TEST(Split, Deterministic) {
  std::vector<std::string> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(std::to_string(i % 4));
  const auto a = stratified_split_indices(labels, 0.6, 9);
  const auto b = stratified_split_indices(labels, 0.6, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
}
