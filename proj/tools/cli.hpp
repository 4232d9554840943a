#pragma once

// Command-line front end. `run` takes the arguments without the program
// name and never exits the process, so tests can drive it directly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slts/slts.hpp"

namespace slts::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericFailure = 3 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonPositiveInput:
    case ErrorCode::CountOutOfRange:
    case ErrorCode::TooLarge:
      return kUsage;
    case ErrorCode::NonFinite:
      return kNumericFailure;
    default:
      return kDataError;
  }
}

struct Config {
  std::string command;
  std::string train, test, model, out = ".";
  std::uint64_t seed = 0;
  std::string landmarks = "random";
  std::size_t n_landmarks = 20;
  std::string gamma_grid = "0.0001,0.001,0.01,0.1,1,10";
  std::string lambda_grid = "0.1,1,10";
  double validation_fraction = 0.3;
  bool normalize = false;
  unsigned threads = 0;
  std::string method = "slts";
  int max_iters = 5000;
  double rel_tol = 1e-7;
  double step0 = 1.0;
  std::size_t splits = 0;
  double delta = 0.05;
  // synth
  std::size_t n_train = 100, n_test = 100;
  Index dim = 4;
  // bounds
  double gamma = 1.0, lambda = 1.0, epsilon1 = 1.0, tau = 1.0;
  std::size_t m = 100;
};

inline std::vector<double> parse_grid(const std::string& csv, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      detail::require(used == tok.size(), ErrorCode::InvalidArgument, "");
    } catch (const std::exception&) {
      detail::fail(ErrorCode::InvalidArgument, flag + ": cannot parse '" + tok + "'");
    }
  }
  detail::require(!out.empty(), ErrorCode::InvalidArgument, flag + " is empty");
  return out;
}

inline Grid grid_of(const Config& c) {
  Grid g;
  g.gammas = parse_grid(c.gamma_grid, "--gamma-grid");
  g.lambdas = parse_grid(c.lambda_grid, "--lambda-grid");
  g.validation_fraction = c.validation_fraction;
  g.validate();
  return g;
}

inline SolverOptions solver_of(const Config& c) {
  SolverOptions s;
  s.max_iters = c.max_iters;
  s.rel_tol = c.rel_tol;
  s.step0 = c.step0;
  s.seed = c.seed;
  s.validate();
  return s;
}

inline FitOptions fit_of(const Config& c) {
  detail::require(c.method == "slts" || c.method == "bbs", ErrorCode::InvalidArgument,
                  "--method must be slts or bbs");
  return {solver_of(c), c.method == "slts"};
}

/// The effective configuration of a command, defaults expanded.
inline json echo(const Config& c) {
  json j{{"command", c.command}, {"seed", c.seed}, {"normalize", c.normalize}};
  const auto& cmd = c.command;
  if (cmd == "train" || cmd == "eval" || cmd == "landmarks" || cmd == "pca") j["train"] = c.train;
  if (cmd == "predict" || cmd == "eval" || cmd == "pca") j["test"] = c.test;
  if (cmd == "predict" || cmd == "eval" || cmd == "pca") j["model"] = c.model;
  if (cmd == "train" || cmd == "landmarks" || (cmd == "eval" && c.splits > 0)) {
    j["landmarks"] = c.landmarks;
    j["n_landmarks"] = c.n_landmarks;
  }
  if (cmd == "train" || (cmd == "eval" && c.splits > 0)) {
    j["method"] = c.method;
    j["gamma_grid"] = parse_grid(c.gamma_grid, "--gamma-grid");
    j["lambda_grid"] = parse_grid(c.lambda_grid, "--lambda-grid");
    j["validation_fraction"] = c.validation_fraction;
    j["solver"] = {{"max_iters", c.max_iters}, {"rel_tol", c.rel_tol}, {"step0", c.step0}};
  }
  if (cmd == "eval") {
    j["splits"] = c.splits;
    j["delta"] = c.delta;
  }
  if (cmd == "synth") {
    j["n_train"] = c.n_train;
    j["n_test"] = c.n_test;
    j["dim"] = c.dim;
  }
  if (cmd == "bounds") {
    j.erase("normalize");
    j.erase("seed");
    j.update({{"dim", c.dim}, {"gamma", c.gamma}, {"lambda", c.lambda}, {"m", c.m},
              {"delta", c.delta}, {"epsilon1", c.epsilon1}, {"tau", c.tau}});
  }
  return j;
}

inline std::string out_path(const Config& c, const std::string& name) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

inline Dataset load(const std::string& path, const std::string& flag, bool normalize) {
  detail::require(!path.empty(), ErrorCode::InvalidArgument, flag + " is required");
  return load_dataset(path, normalize);
}

/// Loads a model; data fed to it is normalized when either the flag or the
/// training run asked for it.
inline OvrModel load_model(const Config& c, bool& normalize) {
  detail::require(!c.model.empty(), ErrorCode::InvalidArgument, "--model is required");
  const json j = read_json_file(c.model);
  normalize = c.normalize || j.value(json::json_pointer("/config/normalize"), false);
  return ovr_model_from_json(j);
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_synth(const Config& c, std::ostream& out) {
  SynthOptions opts;
  opts.seed = c.seed;
  opts.n_train = c.n_train;
  opts.n_test = c.n_test;
  opts.dim = c.dim;
  const auto [train, test] = make_synthetic(opts);
  save_dataset(out_path(c, "train.jsonl"), train);
  save_dataset(out_path(c, "test.jsonl"), test);
  json meta = echo(c);
  meta["signal"] = opts.signal;
  meta["noise"] = opts.noise;
  meta["min_length"] = opts.min_length;
  meta["max_length"] = opts.max_length;
  write_json_file(out_path(c, "synth.json"), {{"config", meta}});
  out << "wrote " << train.size() << " train and " << test.size() << " test series to " << c.out << "\n";
  return kOk;
}

inline int cmd_landmarks(const Config& c, std::ostream& out) {
  const Dataset train = load(c.train, "--train", c.normalize);
  const LandmarkSet set = select_landmarks(train, landmark_method_from_string(c.landmarks), c.n_landmarks, c.seed);
  json j = to_json(set);
  j["config"] = echo(c);
  write_json_file(out_path(c, "landmarks.json"), j);
  out << "selected " << set.size() << " landmarks (" << c.landmarks << ")\n";
  return kOk;
}

inline int cmd_train(const Config& c, std::ostream& out) {
  const Dataset train = load(c.train, "--train", c.normalize);
  TrainOptions opts{grid_of(c), fit_of(c), c.seed};
  const LandmarkSet set = select_landmarks(train, landmark_method_from_string(c.landmarks), c.n_landmarks, c.seed);
  const OvrTraining t = ovr_train(train, set, opts);

  const json config = echo(c);
  write_json_file(out_path(c, "model.json"), to_json(t.model, config));
  json reports = json::array();
  for (std::size_t k = 0; k < t.reports.size(); ++k) {
    json r = opts.fit.learn_metric ? to_json(t.reports[k]) : json::object();
    r["label"] = t.model.classes[k];
    r["alpha_l1"] = t.model.models[k].separator.alpha.lpNorm<1>();
    reports.push_back(std::move(r));
  }
  write_json_file(out_path(c, "train_report.json"),
                  {{"config", config}, {"landmarks", to_json(set)}, {"cv", to_json(t.cv)}, {"classes", reports}});
  out << "trained " << t.model.classes.size() << " class models, gamma=" << t.cv.best_gamma
      << " lambda=" << t.cv.best_lambda << "\n";
  return kOk;
}

inline int cmd_predict(const Config& c, std::ostream& out) {
  bool normalize = false;
  const OvrModel model = load_model(c, normalize);
  const Dataset test = load(c.test, "--test", normalize);
  const auto predicted = ovr_predict(model, test);
  json rows = json::array();
  for (std::size_t i = 0; i < test.size(); ++i)
    rows.push_back({{"id", test[i].series.id()}, {"predicted", predicted[i]}});
  write_json_file(out_path(c, "predictions.json"), {{"config", echo(c)}, {"predictions", rows}});
  out << "predicted " << predicted.size() << " series\n";
  return kOk;
}

/// One run of the split protocol: re-split the pooled data, pick landmarks,
/// train, score.
inline double split_run(const Dataset& pool, double train_fraction, const Config& c, std::uint64_t seed) {
  const auto [train, test] = split_dataset(pool, train_fraction, seed);
  const LandmarkSet set = select_landmarks(train, landmark_method_from_string(c.landmarks),
                                           std::min(c.n_landmarks, train.size()), seed);
  const OvrTraining t = ovr_train(train, set, {grid_of(c), fit_of(c), seed});
  return accuracy(ovr_predict(t.model, test), test.labels());
}

inline int cmd_eval(const Config& c, std::ostream& out) {
  if (c.splits > 0) {
    const Dataset train = load(c.train, "--train", c.normalize);
    Dataset pool = train;
    if (!c.test.empty()) {
      const Dataset test = load(c.test, "--test", c.normalize);
      for (const auto& item : test.items()) pool.add(item);
    }
    const double fraction = static_cast<double>(train.size()) / static_cast<double>(pool.size());
    std::vector<double> accs;
    for (std::size_t s = 0; s < c.splits; ++s) accs.push_back(split_run(pool, fraction, c, c.seed + s));
    const ConfidenceInterval ci = confidence_interval(accs);
    write_json_file(out_path(c, "eval_splits.json"), {{"config", echo(c)},
                                                      {"train_fraction", fraction},
                                                      {"accuracies", accs},
                                                      {"mean", ci.mean},
                                                      {"half_width_95", ci.half_width}});
    out << c.method << " accuracy " << fixed(100 * ci.mean, 1) << " +- " << fixed(100 * ci.half_width, 1) << " over "
        << c.splits << " splits\n";
    return kOk;
  }

  bool normalize = false;
  const OvrModel model = load_model(c, normalize);
  const Dataset test = load(c.test, "--test", normalize);
  std::optional<Dataset> train;
  if (!c.train.empty()) train = load_dataset(c.train, normalize);
  const EvalReport r = evaluate(model, test, train ? &*train : nullptr, c.delta);
  json j = to_json(r);
  j["config"] = echo(c);
  write_json_file(out_path(c, "eval_report.json"), j);
  out << "accuracy " << fixed(r.accuracy) << " on " << test.size() << " series\n";
  return kOk;
}

inline std::string file_stem_for(std::size_t k, const std::string& label) {
  std::string s = std::to_string(k) + "_";
  for (char ch : label) s += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return s;
}

/// PCA of each class model's feature space over the --test data (or --train
/// when no test set is given).
inline int cmd_pca(const Config& c, std::ostream& out) {
  bool normalize = false;
  const OvrModel model = load_model(c, normalize);
  const bool use_test = !c.test.empty();
  const Dataset ds = load(use_test ? c.test : c.train, use_test ? "--test" : "--train", normalize);
  detail::require(ds.dim() == model.dim(), ErrorCode::DimMismatch,
                  "data has d=" + std::to_string(ds.dim()) + ", model has d=" + std::to_string(model.dim()));
  for (std::size_t k = 0; k < model.classes.size(); ++k) {
    const PcaResult pca = pca_project(feature_matrix(ds, model.models[k].similarity));
    const std::string stem = "pca_" + file_stem_for(k, model.classes[k]);
    std::ostringstream csv;
    write_pca_csv(csv, ds, pca);
    write_text_file(out_path(c, stem + ".csv"), csv.str());
    json v = pca_variance_json(pca);
    v["label"] = model.classes[k];
    v["config"] = echo(c);
    write_json_file(out_path(c, stem + ".json"), v);
    out << model.classes[k] << ": pc1 " << fixed(100 * pca.explained[0], 1) << "%, pc2 "
        << fixed(100 * pca.explained[1], 1) << "%\n";
  }
  return kOk;
}

inline int cmd_bounds(const Config& c, std::ostream& out) {
  const LandmarkCount du = landmark_count_bound(c.epsilon1, c.gamma, c.delta, c.tau);
  const json j{{"config", echo(c)},
               {"loss_cap", loss_bound(c.dim, c.gamma, c.lambda)},
               {"metric_norm_cap", metric_norm_bound(c.lambda)},
               {"lipschitz", loss_lipschitz(c.dim, c.gamma)},
               {"kappa", stability_constant(c.dim, c.gamma, c.lambda)},
               {"generalization_rhs", generalization_bound_rhs(c.dim, c.gamma, c.lambda, c.m, c.delta)},
               {"landmark_count", du.value},
               {"landmark_condition_holds", du.condition_holds}};
  out << j.dump(2) << "\n";
  if (!du.condition_holds) out << "warning: delta >= epsilon1*gamma/4, the landmark count guarantee does not apply\n";
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Similarity learning for multivariate time series"};
  app.require_subcommand(1);
  Config c;

  const auto seed = [&](CLI::App* s) { s->add_option("--seed", c.seed, "random seed")->capture_default_str(); };
  const auto normalize = [&](CLI::App* s) {
    s->add_flag("--normalize", c.normalize, "L2-normalize every time step on load");
  };
  const auto threads = [&](CLI::App* s) { s->add_option("--threads", c.threads, "worker cap (0: all cores)"); };
  const auto out_dir = [&](CLI::App* s) { s->add_option("--out", c.out, "output directory")->capture_default_str(); };
  const auto landmarks = [&](CLI::App* s) {
    s->add_option("--landmarks", c.landmarks, "random|kmedoids|dselect")
        ->check(CLI::IsMember({"random", "kmedoids", "dselect"}))
        ->capture_default_str();
    s->add_option("--n-landmarks", c.n_landmarks, "landmark count")->capture_default_str();
  };
  const auto common = [&](CLI::App* s) {
    seed(s);
    normalize(s);
    threads(s);
    out_dir(s);
  };
  const auto training = [&](CLI::App* s) {
    landmarks(s);
    s->add_option("--gamma-grid", c.gamma_grid, "comma-separated gammas")->capture_default_str();
    s->add_option("--lambda-grid", c.lambda_grid, "comma-separated lambdas")->capture_default_str();
    s->add_option("--validation-fraction", c.validation_fraction)->capture_default_str();
    s->add_option("--method", c.method, "slts, or bbs for the identity metric")
        ->check(CLI::IsMember({"slts", "bbs"}))
        ->capture_default_str();
    s->add_option("--max-iters", c.max_iters)->capture_default_str();
    s->add_option("--rel-tol", c.rel_tol)->capture_default_str();
    s->add_option("--step0", c.step0)->capture_default_str();
  };

  auto* synth = app.add_subcommand("synth", "generate the seeded two-class synthetic datasets");
  seed(synth);
  out_dir(synth);
  synth->add_option("--n-train", c.n_train)->capture_default_str();
  synth->add_option("--n-test", c.n_test)->capture_default_str();
  synth->add_option("--dim", c.dim)->capture_default_str();

  auto* lm = app.add_subcommand("landmarks", "select landmarks from a training set");
  lm->add_option("--train", c.train)->required();
  landmarks(lm);
  common(lm);

  auto* train = app.add_subcommand("train", "cross-validate and fit one-vs-rest models");
  train->add_option("--train", c.train)->required();
  training(train);
  common(train);

  auto* predict = app.add_subcommand("predict", "label a dataset with a trained model");
  predict->add_option("--model", c.model)->required();
  predict->add_option("--test", c.test)->required();
  common(predict);

  auto* eval = app.add_subcommand("eval", "score a model, or run the repeated-split protocol with --splits");
  eval->add_option("--model", c.model);
  eval->add_option("--test", c.test);
  eval->add_option("--train", c.train, "training data (bounds and 1NN, or the pool for --splits)");
  eval->add_option("--splits", c.splits, "number of seeded re-splits (0: evaluate --model)")->capture_default_str();
  eval->add_option("--delta", c.delta)->capture_default_str();
  training(eval);
  common(eval);

  auto* pca = app.add_subcommand("pca", "project a dataset onto the first two principal components");
  pca->add_option("--model", c.model)->required();
  pca->add_option("--test", c.test, "data to project");
  pca->add_option("--train", c.train, "data to project when --test is absent");
  common(pca);

  auto* bounds = app.add_subcommand("bounds", "evaluate the theoretical bounds");
  bounds->add_option("--dim", c.dim)->capture_default_str();
  bounds->add_option("--gamma", c.gamma)->capture_default_str();
  bounds->add_option("--lambda", c.lambda)->capture_default_str();
  bounds->add_option("--m", c.m, "training set size")->capture_default_str();
  bounds->add_option("--delta", c.delta)->capture_default_str();
  bounds->add_option("--epsilon1", c.epsilon1)->capture_default_str();
  bounds->add_option("--tau", c.tau)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  c.command = app.get_subcommands().front()->get_name();
  set_max_threads(c.threads);
  try {
    if (c.command == "synth") return cmd_synth(c, out);
    if (c.command == "landmarks") return cmd_landmarks(c, out);
    if (c.command == "train") return cmd_train(c, out);
    if (c.command == "predict") return cmd_predict(c, out);
    if (c.command == "eval") return cmd_eval(c, out);
    if (c.command == "pca") return cmd_pca(c, out);
    return cmd_bounds(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace slts::cli
