#pragma once

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slts/slts.hpp"

namespace slts::testing {

inline Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  Matrix m(static_cast<Index>(values.size()), static_cast<Index>(values.begin()->size()));
  Index i = 0;
  for (const auto& row : values) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline TimeSeries series(std::initializer_list<std::initializer_list<double>> values, std::string id = "s") {
  return TimeSeries(std::move(id), rows(values));
}

inline TimeSeries random_series(std::mt19937_64& rng, Index t, Index d, std::string id = "r") {
  return TimeSeries(std::move(id), oracle::random_unit_rows(rng, t, d));
}

inline Dataset random_dataset(std::mt19937_64& rng, std::size_t m, Index d, Index tmin, Index tmax,
                              const std::vector<std::string>& labels) {
  std::uniform_int_distribution<Index> len(tmin, tmax);
  Dataset ds;
  for (std::size_t i = 0; i < m; ++i)
    ds.add({random_series(rng, len(rng), d, "x" + std::to_string(i)), labels[i % labels.size()]});
  return ds;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("slts_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace slts::testing
