#pragma once

// JSON and CSV artifacts: models, landmark sets, solver/eval reports, PCA
// exports. nlohmann's number output is the shortest round-tripping form, so
// a written model reloads bit-exactly.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slts/eval.hpp"
#include "slts/landmarks.hpp"

namespace slts {

using nlohmann::json;

namespace detail {

template <typename F>
auto parse_guard(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

}  // namespace detail

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw std::invalid_argument("expected a non-empty matrix");
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw std::invalid_argument("ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = j[i][k].get<double>();
  }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

// ---------------------------------------------------------------------------
// Models

inline json to_json(const SimilarityModel& sm) {
  json landmarks = json::array();
  for (const auto& l : sm.landmarks) landmarks.push_back(series_to_json(l));
  return json{{"dim", sm.dim()},
              {"gamma", sm.gamma},
              {"lambda", sm.lambda},
              {"policy", to_string(sm.policy)},
              {"metric", matrix_to_json(sm.metric.entries())},
              {"landmarks", std::move(landmarks)}};
}

inline SimilarityModel similarity_model_from_json(const json& j) {
  return detail::parse_guard("similarity model", [&] {
    SimilarityModel sm;
    sm.metric = MetricMatrix(matrix_from_json(j.at("metric")));
    sm.gamma = j.at("gamma").get<double>();
    sm.lambda = j.at("lambda").get<double>();
    sm.policy = alignment_policy_from_string(j.at("policy").get<std::string>());
    for (const auto& l : j.at("landmarks")) sm.landmarks.push_back(series_from_json(l, false));
    detail::require(j.at("dim").get<Index>() == sm.dim(), ErrorCode::DimMismatch,
                    "'dim' disagrees with the metric size");
    sm.validate();
    return sm;
  });
}

/// `config` is echoed verbatim so the artifact records how it was produced.
inline json to_json(const OvrModel& model, const json& config = json::object()) {
  json per_class = json::array();
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    json entry = to_json(model.models[c].similarity);
    entry["label"] = model.classes[c];
    entry["alpha"] = vector_to_json(model.models[c].separator.alpha);
    per_class.push_back(std::move(entry));
  }
  return json{{"classes", model.classes}, {"models", std::move(per_class)}, {"config", config}};
}

inline OvrModel ovr_model_from_json(const json& j) {
  return detail::parse_guard("model", [&] {
    OvrModel model;
    model.classes = j.at("classes").get<std::vector<std::string>>();
    for (const auto& entry : j.at("models")) {
      BinaryModel bm;
      bm.similarity = similarity_model_from_json(entry);
      bm.separator.alpha = vector_from_json(entry.at("alpha"));
      bm.separator.gamma = bm.similarity.gamma;
      model.models.push_back(std::move(bm));
    }
    validate(model);
    return model;
  });
}

inline json to_json(const LandmarkSet& set) {
  return json{{"method", to_string(set.method)}, {"seed", set.seed}, {"indices", set.indices}};
}

inline LandmarkSet landmark_set_from_json(const json& j) {
  return detail::parse_guard("landmark set", [&] {
    LandmarkSet set;
    set.method = landmark_method_from_string(j.at("method").get<std::string>());
    set.seed = j.at("seed").get<std::uint64_t>();
    set.indices = j.at("indices").get<std::vector<std::size_t>>();
    detail::require(!set.indices.empty(), ErrorCode::EmptyLandmarks, "landmark set is empty");
    return set;
  });
}

// ---------------------------------------------------------------------------
// Reports

inline json to_json(const SolverReport& r) {
  return json{{"iterations", r.iterations},
              {"final_objective", r.final_objective},
              {"best_objective", r.best_objective},
              {"converged", r.converged},
              {"metric_norm", r.metric_norm},
              {"max_example_loss", r.max_example_loss},
              {"norm_bound_holds", r.norm_bound_holds},
              {"loss_bound_holds", r.loss_bound_holds}};
}

inline json to_json(const CvResult& cv) {
  json table = json::array();
  for (const auto& e : cv.table) table.push_back({{"gamma", e.gamma}, {"lambda", e.lambda}, {"accuracy", e.accuracy}});
  return json{{"best_gamma", cv.best_gamma},
              {"best_lambda", cv.best_lambda},
              {"split_attempts", cv.split_attempts},
              {"table", std::move(table)}};
}

inline json to_json(const BoundReport& b) {
  return json{{"empirical_risk", b.empirical_risk}, {"holdout_risk", b.holdout_risk}, {"rhs", b.rhs},
              {"loss_cap", b.loss_cap},             {"delta", b.delta},               {"holds", b.holds}};
}

inline json to_json(const EvalReport& r) {
  json per_class = json::array();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto acc = r.class_accuracy(c);
    per_class.push_back({{"label", r.classes[c]},
                         {"total", r.class_totals[c]},
                         {"correct", r.class_correct[c]},
                         {"accuracy", acc ? json(*acc) : json(nullptr)}});
  }
  json out{{"accuracy", r.accuracy},
           {"classes", r.classes},
           {"per_class", std::move(per_class)},
           {"confusion", r.confusion},
           {"mean_hinge_loss", r.mean_hinge_loss}};
  if (!r.bounds.empty()) {
    json bounds = json::array();
    for (const auto& b : r.bounds) {
      json entry = to_json(b.bounds);
      entry["label"] = b.label;
      bounds.push_back(std::move(entry));
    }
    out["bounds"] = std::move(bounds);
  }
  if (r.nn1_accuracy) out["nn1_accuracy"] = *r.nn1_accuracy;
  return out;
}

// ---------------------------------------------------------------------------
// PCA export

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_pca_csv(std::ostream& out, const Dataset& ds, const PcaResult& pca) {
  detail::require(pca.coordinates.rows() == static_cast<Index>(ds.size()), ErrorCode::LengthMismatch,
                  "PCA rows differ from the dataset size");
  out << "id,label,pc1,pc2\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = static_cast<Index>(i);
    out << csv_field(ds[i].series.id()) << ',' << csv_field(ds[i].label) << ',' << format_double(pca.coordinates(r, 0))
        << ',' << format_double(pca.coordinates(r, 1)) << '\n';
  }
}

inline json pca_variance_json(const PcaResult& pca) {
  return json{{"explained_variance", {pca.explained[0], pca.explained[1]}},
              {"components", matrix_to_json(pca.components)}};
}

// ---------------------------------------------------------------------------
// Files

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "'");
  return detail::parse_guard(path, [&] { return json::parse(in); });
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  detail::require(static_cast<bool>(out), ErrorCode::Io, "write to '" + path + "' failed");
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace slts
