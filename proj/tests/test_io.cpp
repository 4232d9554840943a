#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"

using namespace slts;

namespace {

OvrTraining trained() {
  SynthOptions s;
  s.n_train = 30;
  s.n_test = 4;
  const auto [train, test] = make_synthetic(s);
  TrainOptions o;
  o.grid.gammas = {0.1, 1.0};
  o.grid.lambdas = {1.0};
  o.fit.solver.max_iters = 300;
  return ovr_train(train, select_random(train, 6, 1), o);
}

}  // namespace

TEST(ModelJson, RoundTripIsExact) {
  const OvrTraining t = trained();
  const json j = to_json(t.model, {{"seed", 1}});
  const OvrModel back = ovr_model_from_json(json::parse(j.dump()));
  ASSERT_EQ(back.classes, t.model.classes);
  for (std::size_t c = 0; c < back.models.size(); ++c) {
    EXPECT_EQ(back.models[c].similarity.metric.entries(), t.model.models[c].similarity.metric.entries());
    EXPECT_EQ(back.models[c].separator.alpha, t.model.models[c].separator.alpha);
    EXPECT_EQ(back.models[c].similarity.landmarks, t.model.models[c].similarity.landmarks);
    EXPECT_EQ(back.models[c].similarity.gamma, t.model.models[c].similarity.gamma);
  }
  EXPECT_EQ(to_json(back, {{"seed", 1}}).dump(), j.dump());
}

TEST(ModelJson, SimilarityLayout) {
  const OvrTraining t = trained();
  const json j = to_json(t.model.models[0].similarity);
  EXPECT_EQ(j.at("dim"), 4);
  EXPECT_EQ(j.at("policy"), "fixed_identity");
  EXPECT_EQ(j.at("metric").size(), 4u);
  EXPECT_EQ(j.at("landmarks").size(), 6u);
  EXPECT_TRUE(j.at("landmarks")[0].contains("values"));
}

TEST(ModelJson, RejectsInconsistentModels) {
  const OvrTraining t = trained();
  json j = to_json(t.model);
  j["models"][0]["alpha"].push_back(0.0);
  try {
    ovr_model_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }
  json k = to_json(t.model);
  k["models"][1].erase("metric");
  try {
    ovr_model_from_json(k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
}

TEST(LandmarkSetJson, RoundTrip) {
  const LandmarkSet s{{4, 1, 7}, LandmarkMethod::DSelect, 99};
  const json j = to_json(s);
  EXPECT_EQ(j.dump(), R"({"indices":[4,1,7],"method":"dselect","seed":99})");
  const LandmarkSet back = landmark_set_from_json(j);
  EXPECT_EQ(back.indices, s.indices);
  EXPECT_EQ(back.method, s.method);
  EXPECT_EQ(back.seed, s.seed);
}

TEST(ReportJson, SolverFields) {
  const json j = to_json(trained().reports[0]);
  for (const char* key : {"iterations", "final_objective", "best_objective", "converged", "metric_norm",
                          "norm_bound_holds", "loss_bound_holds"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST(PcaCsv, HeaderAndQuoting) {
  Dataset ds;
  ds.add({slts::testing::series({{1, 0}}, "plain"), "a"});
  ds.add({slts::testing::series({{0, 1}}, "with,comma"), "b"});
  PcaResult pca;
  pca.coordinates = slts::testing::rows({{0.5, -0.25}, {-0.5, 0.25}});
  std::ostringstream out;
  write_pca_csv(out, ds, pca);
  EXPECT_EQ(out.str(), "id,label,pc1,pc2\nplain,a,0.5,-0.25\n\"with,comma\",b,-0.5,0.25\n");
}
