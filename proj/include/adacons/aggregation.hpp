// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Gradient aggregation rules for synchronous data parallelism: plain
// averaging and AdaCons, which reweights the worker gradients by their
// agreement with the mean gradient.
//
// AdaCons pipeline for worker gradients g_1..g_N with mean m:
//   raw_i      = <g_i, m> / ||g_i||                     (first-order subspace step)
//   smoothed   = sorted EMA of raw across iterations    (optional)
//   u_i        = smoothed_i / ||g_i||
//   gamma_i    = u_i / sum_j u_j                        (optional, else lambda * u_i)
//   direction  = sum_i gamma_i g_i
// Coefficients are kept positive; the optimizer applies the minus sign.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "adacons/collectives.hpp"
#include "adacons/kernels.hpp"

namespace adacons {

inline constexpr double kDefaultEpsilon = 1e-12;

/// The N worker gradients of one iteration, i.e. the columns of the
/// subspace matrix. Construction validates shape and finiteness and caches
/// the column norms.
class GradientSet {
 public:
  explicit GradientSet(std::vector<Vector> directions);

  std::size_t worker_count() const noexcept { return directions_.size(); }
  std::size_t dimension() const noexcept { return directions_.front().size(); }
  std::span<const Vector> directions() const noexcept { return directions_; }
  const Vector& operator[](std::size_t i) const { return directions_[i]; }
  std::span<const double> norms() const noexcept { return norms_; }

 private:
  std::vector<Vector> directions_;
  Vector norms_;
};

/// How the unbiasing denominator is formed.
enum class NormalizationForm {
  /// lambda = 1 / sum_i <g_i,m>/||g_i||^2; the weights sum to one.
  squared,
  /// lambda = 1 / sum_i <g_i,m>/||g_i|| as literally printed in the
  /// original derivation. Weights do not sum to one; kept for comparison.
  unsquared,
};

struct AdaConsConfig {
  double beta = 0.99;
  bool use_momentum = true;
  bool use_normalization = true;
  double epsilon = kDefaultEpsilon;
  double fallback_lambda = 1.0;  // lambda when normalization is off
  NormalizationForm normalization_form = NormalizationForm::squared;

  /// Throws UsageError naming the bad field.
  void validate() const;
};

/// Coefficients of one aggregation round in worker order.
struct Coefficients {
  Vector raw;         // <g_i, m> / ||g_i||
  Vector smoothed;    // after sorted EMA (== raw when momentum is off)
  Vector normalized;  // gamma
  double lambda = 0.0;
  bool fallback = false;  // uniform 1/N weights were used
};

/// Exponential moving average kept in sorted-coefficient space, so that the
/// smoothing does not depend on which worker produced which coefficient.
/// Single owner; not safe for concurrent use.
class MomentumState {
 public:
  MomentumState(std::size_t worker_count, double beta);

  std::size_t worker_count() const noexcept { return sorted_ema_.size(); }
  double beta() const noexcept { return beta_; }
  bool initialized() const noexcept { return initialized_; }
  std::size_t iteration() const noexcept { return iteration_; }
  std::span<const double> sorted_ema() const noexcept { return sorted_ema_; }

  /// Test hook: install an EMA buffer directly. Must be non-decreasing.
  void seed(Vector sorted_ema);

 private:
  friend Vector apply_momentum(std::span<const double>, MomentumState&);

  double beta_;
  Vector sorted_ema_;
  bool initialized_ = false;
  std::size_t iteration_ = 0;
};

struct NormalizedWeights {
  Vector gamma;
  double lambda = 0.0;  // 0 when the uniform fallback fired
  bool fallback = false;
};

struct AdaConsResult {
  Vector direction;
  Coefficients coefficients;
};

/// (1/N) sum_i g_i through one all-reduce.
Vector mean_gradient(const GradientSet& grads, CollectiveBus& bus);

/// raw_i = <g_i, mean> / ||g_i||, or 0 when ||g_i|| < epsilon.
Vector raw_coefficients(const GradientSet& grads, std::span<const double> mean,
                        double epsilon = kDefaultEpsilon);

/// Folds `raw` into the sorted EMA and returns the smoothed values handed
/// back through the inverse of this call's sort permutation. Ties sort by
/// worker index. The first call initializes the EMA with sort(raw).
Vector apply_momentum(std::span<const double> raw, MomentumState& state);

/// gamma_i = lambda * u_i with u_i = smoothed_i / ||g_i|| and lambda chosen
/// so that sum gamma = 1. A vanishing or non-positive denominator falls back
/// to gamma_i = 1/N with `fallback` set.
NormalizedWeights normalize_unbiased(
    std::span<const double> smoothed, const GradientSet& grads,
    double epsilon = kDefaultEpsilon,
    NormalizationForm form = NormalizationForm::squared);

/// Full AdaCons round: two all-reduces of d elements and one all-gather of
/// N scalars. `state` is only touched when momentum is enabled.
AdaConsResult aggregate_adacons(const GradientSet& grads, MomentumState& state,
                                const AdaConsConfig& config, CollectiveBus& bus);

/// Baseline: the mean gradient, one all-reduce.
Vector aggregate_average(const GradientSet& grads, CollectiveBus& bus);

/// lambda * sum_i g_i g_i^T v / ||g_i||^2. Analysis utility for the
/// preconditioner view of AdaCons; not used on the training path.
Vector preconditioner_apply(const GradientSet& grads, std::span<const double> v,
                            double lambda);

}  // namespace adacons
