// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "adacons/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adacons/errors.hpp"

namespace adacons {

namespace {

void require_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(n) +
                         ", got " + std::to_string(v.size()));
}

double sum_in_order(std::span<const double> v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc;
}

// u_i = c_i / ||g_i||, zero for vanishing gradients.
Vector reprojection_weights(std::span<const double> coefficients,
                            const GradientSet& grads, double epsilon) {
  const auto norms = grads.norms();
  Vector u(coefficients.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = norms[i] < epsilon ? 0.0 : coefficients[i] / norms[i];
  return u;
}

}  // namespace

GradientSet::GradientSet(std::vector<Vector> directions)
    : directions_(std::move(directions)) {
  if (directions_.empty()) throw DimensionError("gradient set needs at least one worker");
  const std::size_t d = directions_.front().size();
  if (d == 0) throw DimensionError("gradient dimension must be at least 1");
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    if (directions_[i].size() != d)
      throw DimensionError("gradient " + std::to_string(i) + " has length " +
                           std::to_string(directions_[i].size()) + ", expected " +
                           std::to_string(d));
    if (!kernels::all_finite(directions_[i]))
      throw NumericError("gradient " + std::to_string(i) + " has a non-finite entry");
  }
  norms_.resize(directions_.size());
  kernels::parallel::row_squared_norms(directions_, norms_);
  for (double& n : norms_) n = std::sqrt(n);
}

void AdaConsConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw UsageError("beta", "must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw UsageError("epsilon", "must be positive");
  if (!std::isfinite(fallback_lambda))
    throw UsageError("fallback-lambda", "must be finite");
}

MomentumState::MomentumState(std::size_t worker_count, double beta)
    : beta_(beta), sorted_ema_(worker_count, 0.0) {
  if (!(beta > 0.0 && beta < 1.0)) throw UsageError("beta", "must lie in (0, 1)");
  if (worker_count == 0) throw DimensionError("momentum state needs at least one worker");
}

void MomentumState::seed(Vector sorted_ema) {
  require_length(sorted_ema, worker_count(), "momentum seed");
  if (!std::is_sorted(sorted_ema.begin(), sorted_ema.end()))
    throw Error("momentum seed must be non-decreasing");
  sorted_ema_ = std::move(sorted_ema);
  initialized_ = true;
}

Vector mean_gradient(const GradientSet& grads, CollectiveBus& bus) {
  Vector sum = bus.all_reduce_sum(grads.directions());
  const auto n = static_cast<double>(grads.worker_count());
  for (double& x : sum) x /= n;
  return sum;
}

Vector raw_coefficients(const GradientSet& grads, std::span<const double> mean,
                        double epsilon) {
  require_length(mean, grads.dimension(), "raw_coefficients mean");
  Vector dots(grads.worker_count());
  kernels::parallel::row_dots(grads.directions(), mean, dots);
  return reprojection_weights(dots, grads, epsilon);
}

Vector apply_momentum(std::span<const double> raw, MomentumState& state) {
  const std::size_t n = state.worker_count();
  require_length(raw, n, "apply_momentum");
  if (!kernels::all_finite(raw)) throw NumericError("apply_momentum: non-finite coefficient");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

  Vector& ema = state.sorted_ema_;
  if (!state.initialized_) {
    for (std::size_t k = 0; k < n; ++k) ema[k] = raw[order[k]];
    state.initialized_ = true;
  } else {
    const double beta = state.beta_;
    for (std::size_t k = 0; k < n; ++k)
      ema[k] = beta * ema[k] + (1.0 - beta) * raw[order[k]];
  }
  ++state.iteration_;

  Vector out(n);
  for (std::size_t k = 0; k < n; ++k) out[order[k]] = ema[k];
  return out;
}

NormalizedWeights normalize_unbiased(std::span<const double> smoothed,
                                     const GradientSet& grads, double epsilon,
                                     NormalizationForm form) {
  const std::size_t n = grads.worker_count();
  require_length(smoothed, n, "normalize_unbiased");

  NormalizedWeights result;
  result.gamma = reprojection_weights(smoothed, grads, epsilon);
  const double denominator = form == NormalizationForm::squared
                                 ? sum_in_order(result.gamma)
                                 : sum_in_order(smoothed);
  if (!std::isfinite(denominator) || std::abs(denominator) < epsilon ||
      denominator <= 0.0) {
    std::fill(result.gamma.begin(), result.gamma.end(), 1.0 / static_cast<double>(n));
    result.lambda = 0.0;
    result.fallback = true;
    return result;
  }
  result.lambda = 1.0 / denominator;
  for (double& g : result.gamma) g /= denominator;
  return result;
}

AdaConsResult aggregate_adacons(const GradientSet& grads, MomentumState& state,
                                const AdaConsConfig& config, CollectiveBus& bus) {
  config.validate();
  if (bus.worker_count() != grads.worker_count())
    throw ParticipationError("bus has " + std::to_string(bus.worker_count()) +
                             " workers, gradient set has " +
                             std::to_string(grads.worker_count()));
  if (config.use_momentum && state.worker_count() != grads.worker_count())
    throw DimensionError("momentum state sized for " +
                         std::to_string(state.worker_count()) + " workers");

  AdaConsResult result;
  Coefficients& c = result.coefficients;

  const Vector mean = mean_gradient(grads, bus);
  const Vector local = raw_coefficients(grads, mean, config.epsilon);
  // Every worker needs every coefficient for the sort and the normalizer.
  c.raw = bus.all_gather(local);
  c.smoothed = config.use_momentum ? apply_momentum(c.raw, state) : c.raw;

  if (config.use_normalization) {
    NormalizedWeights w =
        normalize_unbiased(c.smoothed, grads, config.epsilon, config.normalization_form);
    c.normalized = std::move(w.gamma);
    c.lambda = w.lambda;
    c.fallback = w.fallback;
  } else {
    c.normalized = reprojection_weights(c.smoothed, grads, config.epsilon);
    for (double& g : c.normalized) g *= config.fallback_lambda;
    c.lambda = config.fallback_lambda;
  }

  result.direction = bus.all_reduce_weighted_sum(grads.directions(), c.normalized);
  return result;
}

Vector aggregate_average(const GradientSet& grads, CollectiveBus& bus) {
  if (bus.worker_count() != grads.worker_count())
    throw ParticipationError("bus has " + std::to_string(bus.worker_count()) +
                             " workers, gradient set has " +
                             std::to_string(grads.worker_count()));
  return mean_gradient(grads, bus);
}

Vector preconditioner_apply(const GradientSet& grads, std::span<const double> v,
                            double lambda) {
  require_length(v, grads.dimension(), "preconditioner_apply");
  const std::size_t n = grads.worker_count();
  Vector weights(n);
  kernels::parallel::row_dots(grads.directions(), v, weights);
  Vector squared(n);
  kernels::parallel::row_squared_norms(grads.directions(), squared);
  const auto norms = grads.norms();
  for (std::size_t i = 0; i < n; ++i)
    weights[i] = norms[i] < kDefaultEpsilon ? 0.0 : lambda * weights[i] / squared[i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Vector out(grads.dimension());
  kernels::parallel::ordered_weighted_sum(grads.directions(), weights, order, out);
  return out;
}

}  // namespace adacons
