// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "adacons/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace adacons::kernels {

namespace {

// Below this many output elements the fork/join cost dominates.
constexpr std::int64_t kMinParallelElements = 4096;

inline double weight_at(std::span<const double> weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

// Per-element body shared by both variants so the arithmetic order cannot
// drift between them.
inline double weighted_element(std::span<const Vector> rows,
                               std::span<const double> weights,
                               std::span<const std::size_t> order,
                               std::size_t j) {
  double acc = 0.0;
  for (const std::size_t k : order) acc += weight_at(weights, k) * rows[k][j];
  return acc;
}

inline double gradient_element(std::span<const double> projections,
                               std::span<const double> samples, std::size_t d,
                               std::size_t j) {
  double acc = 0.0;
  for (std::size_t s = 0; s < projections.size(); ++s)
    acc += projections[s] * samples[s * d + j];
  return acc / static_cast<double>(projections.size());
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

bool all_finite(std::span<const double> v) {
  for (const double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

namespace serial {

void ordered_weighted_sum(std::span<const Vector> rows,
                          std::span<const double> weights,
                          std::span<const std::size_t> order,
                          std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = weighted_element(rows, weights, order, j);
}

void row_dots(std::span<const Vector> rows, std::span<const double> v,
              std::span<double> out) {
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = dot(rows[i], v);
}

void row_squared_norms(std::span<const Vector> rows, std::span<double> out) {
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = dot(rows[i], rows[i]);
}

void batch_gradient(std::span<const double> w, std::span<const double> samples,
                    std::size_t batch_size, std::span<double> out) {
  const std::size_t d = w.size();
  Vector projections(batch_size);
  for (std::size_t s = 0; s < batch_size; ++s)
    projections[s] = dot(w, samples.subspan(s * d, d));
  for (std::size_t j = 0; j < d; ++j)
    out[j] = gradient_element(projections, samples, d, j);
}

}  // namespace serial

namespace parallel {

void ordered_weighted_sum(std::span<const Vector> rows,
                          std::span<const double> weights,
                          std::span<const std::size_t> order,
                          std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
  const auto work = n * static_cast<std::int64_t>(order.size());
#pragma omp parallel for schedule(static) if (work >= kMinParallelElements)
  for (std::int64_t j = 0; j < n; ++j)
    out[j] = weighted_element(rows, weights, order, static_cast<std::size_t>(j));
}

void row_dots(std::span<const Vector> rows, std::span<const double> v,
              std::span<double> out) {
  const auto n = static_cast<std::int64_t>(rows.size());
  const auto work = n * static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static) if (work >= kMinParallelElements)
  for (std::int64_t i = 0; i < n; ++i) out[i] = dot(rows[i], v);
}

void row_squared_norms(std::span<const Vector> rows, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(rows.size());
  const auto work = rows.empty() ? 0 : n * static_cast<std::int64_t>(rows[0].size());
#pragma omp parallel for schedule(static) if (work >= kMinParallelElements)
  for (std::int64_t i = 0; i < n; ++i) out[i] = dot(rows[i], rows[i]);
}

void batch_gradient(std::span<const double> w, std::span<const double> samples,
                    std::size_t batch_size, std::span<double> out) {
  const std::size_t d = w.size();
  const auto b = static_cast<std::int64_t>(batch_size);
  const auto dims = static_cast<std::int64_t>(d);
  const bool go_parallel = b * dims >= kMinParallelElements;
  Vector projections(batch_size);
#pragma omp parallel if (go_parallel)
  {
#pragma omp for schedule(static)
    for (std::int64_t s = 0; s < b; ++s)
      projections[s] = dot(w, samples.subspan(static_cast<std::size_t>(s) * d, d));
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < dims; ++j)
      out[j] = gradient_element(projections, samples, d, static_cast<std::size_t>(j));
  }
}

}  // namespace parallel
}  // namespace adacons::kernels
