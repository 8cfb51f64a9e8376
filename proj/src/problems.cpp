// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "adacons/problems.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "adacons/errors.hpp"
#include "adacons/random.hpp"

namespace adacons {

namespace {

// Stream tags keep initialization and batch streams disjoint.
constexpr std::uint64_t kInitStream = std::numeric_limits<std::uint64_t>::max();

double sum_in_order(std::span<const double> v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::linear_regression:
      return "linear_regression";
  }
  return "unknown";
}

void ProblemSpec::validate() const {
  if (dimension == 0) throw UsageError("dim", "must be at least 1");
}

Vector SecondMoment::apply(std::span<const double> v) {
  const double shift = kOffDiagonal * sum_in_order(v);
  constexpr double diag = kDiagonal - kOffDiagonal;
  Vector out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = diag * v[j] + shift;
  return out;
}

double SecondMoment::bilinear(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionError("bilinear form: length mismatch");
  constexpr double diag = kDiagonal - kOffDiagonal;
  return diag * kernels::dot(u, v) + kOffDiagonal * sum_in_order(u) * sum_in_order(v);
}

Batch sample_batch(const ProblemSpec& spec, std::size_t worker, std::size_t iteration,
                   std::size_t local_batch) {
  if (local_batch == 0) throw UsageError("local-batch", "must be at least 1");
  Batch batch{worker, iteration, local_batch, spec.dimension, {}};
  batch.samples.resize(local_batch * spec.dimension);
  KeyedStream stream(spec.seed, worker, iteration);
  for (double& x : batch.samples) x = stream.uniform();
  return batch;
}

Vector local_gradient(std::span<const double> w, const Batch& batch) {
  if (w.size() != batch.dimension)
    throw DimensionError("local_gradient: parameter length " + std::to_string(w.size()) +
                         " vs batch dimension " + std::to_string(batch.dimension));
  Vector out(w.size());
  kernels::parallel::batch_gradient(w, batch.samples, batch.size, out);
  return out;
}

double true_objective(std::span<const double> w) {
  return 0.5 * SecondMoment::bilinear(w, w);
}

double exact_line_search(std::span<const double> w, std::span<const double> direction,
                         double epsilon) {
  if (w.size() != direction.size())
    throw DimensionError("exact_line_search: length mismatch");
  const double curvature = SecondMoment::bilinear(direction, direction);
  if (!(curvature >= epsilon)) return 0.0;
  return SecondMoment::bilinear(direction, w) / curvature;
}

Vector initial_point(const ProblemSpec& spec) {
  KeyedStream stream(spec.seed, kInitStream, 0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.dimension));
  Vector w(spec.dimension);
  for (double& x : w) x = scale * stream.normal();
  return w;
}

std::uint64_t batch_digest(const Batch& batch) {
  // FNV-1a style, one 64-bit word per step, finalized with the stream mixer.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ batch.size ^ (batch.dimension << 32);
  for (const double x : batch.samples) {
    h ^= std::bit_cast<std::uint64_t>(x);
    h *= 0x100000001b3ULL;
  }
  h = KeyedStream::mix(h);
  return h;
}

}  // namespace adacons
