#pragma once

// Seeded two-class synthetic data. Every series has two nuisance channels
// following a rotating phase shared by both classes, and two signal channels
// whose cross-correlation sign depends on the class: class "A" moves them
// together, class "B" in opposition. Rows are L2-normalized.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "slts/core.hpp"

namespace slts {

struct SynthOptions {
  std::uint64_t seed = 42;
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  Index dim = 4;  ///< channels beyond the first four are pure noise
  Index min_length = 8;
  Index max_length = 15;
  double signal = 0.25;  ///< mean amplitude of the signal channels
  double noise = 0.25;   ///< per-entry Gaussian noise

  void validate() const {
    detail::require(dim >= 4, ErrorCode::InvalidArgument, "synthetic data needs d >= 4");
    detail::require(min_length >= 1 && max_length >= min_length, ErrorCode::InvalidArgument,
                    "invalid length range");
    detail::require(n_train >= 2 && n_test >= 2, ErrorCode::InvalidArgument, "need at least two series per split");
    detail::require(noise > 0 && signal > 0, ErrorCode::NonPositiveInput, "signal and noise must be positive");
  }
};

inline LabeledSeries synth_series(std::mt19937_64& rng, const SynthOptions& opts, bool class_a, std::string id) {
  std::uniform_int_distribution<Index> length(opts.min_length, opts.max_length);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, opts.noise);

  const Index t = length(rng);
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double speed = 0.3 + 0.5 * unit(rng);
  const double amplitude = opts.signal * (0.6 + 0.8 * unit(rng));
  const double sign = class_a ? 1.0 : -1.0;

  Matrix raw(t, opts.dim);
  for (Index i = 0; i < t; ++i) {
    const double angle = phase + speed * static_cast<double>(i);
    raw(i, 0) = std::cos(angle) + noise(rng);
    raw(i, 1) = std::sin(angle) + noise(rng);
    const double level = amplitude * (1.0 + 0.3 * std::sin(0.5 * angle));
    raw(i, 2) = level + noise(rng);
    raw(i, 3) = sign * level + noise(rng);
    for (Index k = 4; k < opts.dim; ++k) raw(i, k) = noise(rng);
  }
  return {normalize_series(raw, std::move(id)), class_a ? "A" : "B"};
}

/// Balanced train and test sets, items alternating between the two classes.
inline std::pair<Dataset, Dataset> make_synthetic(const SynthOptions& opts = {}) {
  opts.validate();
  std::mt19937_64 rng(opts.seed);
  Dataset train, test;
  for (std::size_t i = 0; i < opts.n_train; ++i)
    train.add(synth_series(rng, opts, i % 2 == 0, "train-" + std::to_string(i)));
  for (std::size_t i = 0; i < opts.n_test; ++i)
    test.add(synth_series(rng, opts, i % 2 == 0, "test-" + std::to_string(i)));
  return {std::move(train), std::move(test)};
}

}  // namespace slts
