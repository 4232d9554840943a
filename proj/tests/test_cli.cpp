#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"

using namespace slts;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Small synthetic data plus quick training flags shared by the tests.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = slts::testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    ASSERT_EQ(run({"synth", "--out", data(), "--seed", "3", "--n-train", "30", "--n-test", "20"}).code, 0);
  }
  std::string data() const { return (dir_ / "data").string(); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::vector<std::string> train_args(const std::string& out) const {
    return {"train", "--train", data() + "/train.jsonl", "--out", out, "--seed", "5", "--n-landmarks", "6",
            "--gamma-grid", "0.1,1", "--lambda-grid", "1", "--max-iters", "300"};
  }
  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthWritesDatasets) {
  const Dataset train = load_dataset(data() + "/train.jsonl", false);
  EXPECT_EQ(train.size(), 30u);
  EXPECT_EQ(train.dim(), 4);
  const json meta = read_json_file(data() + "/synth.json");
  EXPECT_EQ(meta.at("config").at("seed"), 3);
  EXPECT_EQ(meta.at("config").at("command"), "synth");
}

TEST_F(CliTest, TrainPredictEvalPca) {
  const Result t = run(train_args(path("run")));
  ASSERT_EQ(t.code, 0) << t.err;
  ASSERT_TRUE(fs::exists(path("run/model.json")));
  const json model = read_json_file(path("run/model.json"));
  EXPECT_EQ(model.at("config").at("n_landmarks"), 6);
  EXPECT_EQ(model.at("config").at("landmarks"), "random");
  EXPECT_EQ(model.at("config").at("validation_fraction"), 0.3);

  const Result p = run({"predict", "--model", path("run/model.json"), "--test", data() + "/test.jsonl", "--out",
                        path("run")});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(read_json_file(path("run/predictions.json")).at("predictions").size(), 20u);

  const Result e = run({"eval", "--model", path("run/model.json"), "--test", data() + "/test.jsonl", "--train",
                        data() + "/train.jsonl", "--out", path("run")});
  ASSERT_EQ(e.code, 0) << e.err;
  const json report = read_json_file(path("run/eval_report.json"));
  EXPECT_TRUE(report.contains("accuracy"));
  EXPECT_TRUE(report.contains("bounds"));
  EXPECT_TRUE(report.contains("config"));

  const Result c = run({"pca", "--model", path("run/model.json"), "--test", data() + "/test.jsonl", "--out",
                        path("run")});
  ASSERT_EQ(c.code, 0) << c.err;
  const std::string csv = slurp(path("run/pca_0_A.csv"));
  EXPECT_EQ(csv.rfind("id,label,pc1,pc2\n", 0), 0u);
  EXPECT_TRUE(fs::exists(path("run/pca_1_B.json")));
}

TEST_F(CliTest, SameSeedSameBytes) {
  ASSERT_EQ(run(train_args(path("a"))).code, 0);
  ASSERT_EQ(run(train_args(path("b"))).code, 0);
  EXPECT_EQ(slurp(path("a/model.json")), slurp(path("b/model.json")));
  EXPECT_EQ(slurp(path("a/train_report.json")), slurp(path("b/train_report.json")));
}

TEST_F(CliTest, ThreadCapDoesNotChangeResults) {
  auto one = train_args(path("t1"));
  one.insert(one.end(), {"--threads", "1"});
  auto four = train_args(path("t4"));
  four.insert(four.end(), {"--threads", "4"});
  ASSERT_EQ(run(one).code, 0);
  ASSERT_EQ(run(four).code, 0);
  EXPECT_EQ(slurp(path("t1/model.json")), slurp(path("t4/model.json")));
}

TEST_F(CliTest, DimMismatchIsDataError) {
  ASSERT_EQ(run(train_args(path("run"))).code, 0);
  ASSERT_EQ(run({"synth", "--out", path("wide"), "--dim", "5", "--n-train", "4", "--n-test", "4"}).code, 0);
  const Result r = run({"eval", "--model", path("run/model.json"), "--test", path("wide/test.jsonl"), "--out",
                        path("run")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("DimMismatch"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"train"}).code, 1);
  auto bad_grid = train_args(path("x"));
  bad_grid[10] = "0.1,abc";
  EXPECT_EQ(run(bad_grid).code, 1);
  auto too_many = train_args(path("x"));
  too_many[8] = "500";
  EXPECT_EQ(run(too_many).code, 1);
  EXPECT_EQ(run({"train", "--train", data() + "/train.jsonl", "--landmarks", "best"}).code, 1);
}

TEST_F(CliTest, MissingAndMalformedFilesAreDataErrors) {
  EXPECT_EQ(run({"train", "--train", path("missing.jsonl")}).code, 2);
  std::ofstream(path("bad.jsonl")) << "{\"id\": 1}\n";
  const Result r = run({"train", "--train", path("bad.jsonl")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
}

TEST_F(CliTest, LandmarksCommand) {
  const Result r = run({"landmarks", "--train", data() + "/train.jsonl", "--landmarks", "dselect", "--n-landmarks",
                        "5", "--seed", "2", "--out", path("lm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const LandmarkSet s = landmark_set_from_json(read_json_file(path("lm/landmarks.json")));
  EXPECT_EQ(s.method, LandmarkMethod::DSelect);
  EXPECT_EQ(s.size(), 5u);
}

TEST_F(CliTest, SplitProtocol) {
  const Result r = run({"eval", "--train", data() + "/train.jsonl", "--test", data() + "/test.jsonl", "--splits", "2",
                        "--n-landmarks", "6", "--gamma-grid", "1", "--lambda-grid", "1", "--max-iters", "200",
                        "--out", path("cv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = read_json_file(path("cv/eval_splits.json"));
  EXPECT_EQ(j.at("accuracies").size(), 2u);
  EXPECT_NEAR(j.at("train_fraction").get<double>(), 0.6, 1e-12);
}

TEST_F(CliTest, Bounds) {
  const Result r = run({"bounds", "--dim", "2", "--gamma", "1", "--lambda", "1", "--m", "100", "--delta", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out.substr(0, r.out.rfind('}') + 1));
  EXPECT_NEAR(j.at("generalization_rhs").get<double>(), 2.796, 1e-3);
  EXPECT_EQ(j.at("loss_cap").get<double>(), 2.0);
}
