// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Stochastic linear regression: minimize E[ 0.5 (w . x)^2 ] with x uniform
// on [0,1]^d. The population objective is the quadratic 0.5 w^T A w with
// A = E[x x^T] = (1/12) I + (1/4) 1 1^T, so the exact loss and the exact
// line search are both O(d).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "adacons/kernels.hpp"

namespace adacons {

enum class ProblemKind { linear_regression };

std::string_view to_string(ProblemKind kind);

struct ProblemSpec {
  std::size_t dimension = 1000;
  ProblemKind kind = ProblemKind::linear_regression;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One worker's minibatch: `size` samples of length `dimension`, row-major.
struct Batch {
  std::size_t worker_index = 0;
  std::size_t iteration = 0;
  std::size_t size = 0;
  std::size_t dimension = 0;
  Vector samples;

  std::span<const double> sample(std::size_t s) const {
    return std::span<const double>(samples).subspan(s * dimension, dimension);
  }
};

/// Closed-form second moment of U[0,1]^d. Never materialized.
struct SecondMoment {
  static constexpr double kDiagonal = 1.0 / 3.0;
  static constexpr double kOffDiagonal = 1.0 / 4.0;

  /// A v = (1/12) v + (1/4) (sum v) 1
  static Vector apply(std::span<const double> v);
  /// u^T A v
  static double bilinear(std::span<const double> u, std::span<const double> v);
};

/// Deterministic in (spec.seed, worker, iteration).
Batch sample_batch(const ProblemSpec& spec, std::size_t worker, std::size_t iteration,
                   std::size_t local_batch);

/// (1/B) sum_s (w . x_s) x_s
Vector local_gradient(std::span<const double> w, const Batch& batch);

/// 0.5 w^T A w
double true_objective(std::span<const double> w);

/// Minimizer of eta -> true_objective(w - eta * direction). Returns 0 when
/// the curvature along `direction` is below `epsilon`.
double exact_line_search(std::span<const double> w, std::span<const double> direction,
                         double epsilon = 1e-300);

/// Starting point: i.i.d. N(0, 1/d) entries, fixed by spec.seed.
Vector initial_point(const ProblemSpec& spec);

/// 64-bit fingerprint of a batch's bytes, for checking that two runs saw the
/// same data.
std::uint64_t batch_digest(const Batch& batch);

}  // namespace adacons
