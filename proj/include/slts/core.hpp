#pragma once

// Domain types for multivariate time series, per-time-moment normalization,
// JSON Lines ingestion and stratified splitting.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "slts/errors.hpp"

namespace slts {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Rows with an L2 norm below this cannot be normalized.
inline constexpr double kMinRowNorm = 1e-12;

/// A t x d matrix of real values, one row per time moment.
class TimeSeries {
 public:
  TimeSeries(std::string id, Matrix values) : id_(std::move(id)), values_(std::move(values)) {
    detail::require(values_.rows() >= 1 && values_.cols() >= 1, ErrorCode::InvalidArgument,
                    "series '" + id_ + "' must have at least one time moment and one feature");
    detail::require(values_.allFinite(), ErrorCode::NonFinite,
                    "series '" + id_ + "' contains non-finite values");
  }

  const std::string& id() const noexcept { return id_; }
  const Matrix& values() const noexcept { return values_; }
  Index length() const noexcept { return values_.rows(); }
  Index dim() const noexcept { return values_.cols(); }

  bool has_unit_rows(double tol = 1e-9) const {
    for (Index i = 0; i < values_.rows(); ++i)
      if (std::abs(values_.row(i).norm() - 1.0) > tol) return false;
    return true;
  }

  friend bool operator==(const TimeSeries& a, const TimeSeries& b) {
    return a.id_ == b.id_ && a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  std::string id_;
  Matrix values_;
};

struct LabeledSeries {
  TimeSeries series;
  std::string label;

  friend bool operator==(const LabeledSeries&, const LabeledSeries&) = default;
};

/// Ordered collection of labeled series sharing one feature dimension.
/// Lengths may differ. `classes()` lists labels in order of first appearance.
class Dataset {
 public:
  Dataset() = default;

  void add(LabeledSeries item) {
    detail::require(!item.label.empty(), ErrorCode::InvalidArgument,
                    "series '" + item.series.id() + "' has an empty label");
    if (items_.empty()) {
      dim_ = item.series.dim();
    } else if (item.series.dim() != dim_) {
      detail::fail(ErrorCode::DimMismatch, "series '" + item.series.id() + "' has d=" +
                                               std::to_string(item.series.dim()) +
                                               ", dataset has d=" + std::to_string(dim_));
    }
    if (std::find(classes_.begin(), classes_.end(), item.label) == classes_.end())
      classes_.push_back(item.label);
    items_.push_back(std::move(item));
  }

  const std::vector<LabeledSeries>& items() const noexcept { return items_; }
  const LabeledSeries& operator[](std::size_t i) const { return items_[i]; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  Index dim() const noexcept { return dim_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& item : items_) out.push_back(item.label);
    return out;
  }

  Dataset subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    for (std::size_t i : indices) out.add(items_.at(i));
    return out;
  }

 private:
  std::vector<LabeledSeries> items_;
  Index dim_ = 0;
  std::vector<std::string> classes_;
};

/// Divides every row by its L2 norm.
inline TimeSeries normalize_series(const Matrix& raw, std::string id) {
  detail::require(raw.allFinite(), ErrorCode::NonFinite, "series '" + id + "' contains non-finite values");
  Matrix out = raw;
  for (Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm < kMinRowNorm)
      detail::fail(ErrorCode::ZeroTimeStep,
                   "series '" + id + "' has a zero-norm time moment at row " + std::to_string(i));
    out.row(i) /= norm;
  }
  return TimeSeries(std::move(id), std::move(out));
}

inline TimeSeries normalize_series(const TimeSeries& series) {
  return normalize_series(series.values(), series.id());
}

/// +1 for items labeled `positive`, -1 otherwise.
inline std::vector<int> one_vs_rest_signs(const std::vector<std::string>& labels,
                                          const std::string& positive) {
  std::vector<int> signs;
  signs.reserve(labels.size());
  for (const auto& l : labels) signs.push_back(l == positive ? 1 : -1);
  return signs;
}

// ---------------------------------------------------------------------------
// JSON Lines: {"id": "...", "label": "...", "values": [[f64 x d] x t]}

inline nlohmann::json series_to_json(const LabeledSeries& item) {
  nlohmann::json rows = nlohmann::json::array();
  const Matrix& v = item.series.values();
  for (Index i = 0; i < v.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < v.cols(); ++j) row.push_back(v(i, j));
    rows.push_back(std::move(row));
  }
  nlohmann::json out;
  out["id"] = item.series.id();
  out["label"] = item.label;
  out["values"] = std::move(rows);
  return out;
}

inline LabeledSeries series_from_json(const nlohmann::json& j, bool normalize) {
  if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");
  const auto& id = j.at("id").get_ref<const std::string&>();
  const auto& label = j.at("label").get_ref<const std::string&>();
  const auto& rows = j.at("values");
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("'values' must be a non-empty array");
  const std::size_t d = rows.front().is_array() ? rows.front().size() : 0;
  if (d == 0) throw std::invalid_argument("'values' rows must be non-empty arrays");
  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(d));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != d)
      throw std::invalid_argument("row " + std::to_string(i) + " of 'values' has inconsistent width");
    for (std::size_t k = 0; k < d; ++k) {
      if (!row[k].is_number()) throw std::invalid_argument("'values' entries must be numbers");
      values(static_cast<Index>(i), static_cast<Index>(k)) = row[k].get<double>();
    }
  }
  if (label.empty()) throw std::invalid_argument("'label' must be non-empty");
  if (normalize) return LabeledSeries{normalize_series(values, id), label};
  return LabeledSeries{TimeSeries(id, std::move(values)), label};
}

inline Dataset read_dataset(std::istream& in, bool normalize) {
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LabeledSeries item = [&] {
      try {
        return series_from_json(nlohmann::json::parse(line), normalize);
      } catch (const Error& e) {
        throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
      } catch (const std::exception& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }();
    try {
      ds.add(std::move(item));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ds;
}

inline Dataset load_dataset(const std::string& path, bool normalize) {
  std::ifstream in(path);
  detail::require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "'");
  return read_dataset(in, normalize);
}

inline void write_dataset(std::ostream& out, const Dataset& ds) {
  for (const auto& item : ds.items()) out << series_to_json(item).dump() << '\n';
}

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), ErrorCode::Io, "cannot write '" + path + "'");
  write_dataset(out, ds);
}

// ---------------------------------------------------------------------------
// Seeded randomness. libstdc++'s uniform_int_distribution is deterministic for
// a given engine state, which is what reproducible splits need.

namespace detail {

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

inline std::size_t stratum_train_count(std::size_t count, double fraction) {
  // Guards against 0.7 * 10 landing a hair above 7.
  return static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(count) - 1e-9));
}

}  // namespace detail

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified split: each class contributes ceil(fraction * count) items to
/// the training side. Both sides keep dataset order.
inline SplitIndices stratified_split_indices(const std::vector<std::string>& labels,
                                             double train_fraction, std::uint64_t seed) {
  detail::require(!labels.empty(), ErrorCode::EmptyDataset, "cannot split an empty dataset");
  detail::require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::InvalidArgument,
                  "train fraction must lie in (0, 1)");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = by_class.try_emplace(labels[i]);
    if (inserted) order.push_back(labels[i]);
    it->second.push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> in_train(labels.size(), false);
  for (const auto& label : order) {
    auto members = by_class[label];
    detail::shuffle(members, rng);
    const std::size_t take = detail::stratum_train_count(members.size(), train_fraction);
    for (std::size_t k = 0; k < take; ++k) in_train[members[k]] = true;
  }
  SplitIndices out;
  for (std::size_t i = 0; i < labels.size(); ++i) (in_train[i] ? out.train : out.test).push_back(i);
  return out;
}

inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double train_fraction,
                                                 std::uint64_t seed) {
  detail::require(!ds.empty(), ErrorCode::EmptyDataset, "cannot split an empty dataset");
  const auto idx = stratified_split_indices(ds.labels(), train_fraction, seed);
  return {ds.subset(idx.train), ds.subset(idx.test)};
}

}  // namespace slts
