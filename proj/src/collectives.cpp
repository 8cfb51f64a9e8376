// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "adacons/collectives.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "adacons/errors.hpp"

namespace adacons {

CommStats CommStats::operator-(const CommStats& earlier) const {
  return {allreduce_calls - earlier.allreduce_calls,
          allgather_calls - earlier.allgather_calls,
          payload_elements - earlier.payload_elements,
          gather_elements - earlier.gather_elements};
}

CommStats& CommStats::operator+=(const CommStats& other) {
  allreduce_calls += other.allreduce_calls;
  allgather_calls += other.allgather_calls;
  payload_elements += other.payload_elements;
  gather_elements += other.gather_elements;
  return *this;
}

CollectiveBus::CollectiveBus(std::size_t worker_count) : order_(worker_count) {
  if (worker_count == 0) throw ParticipationError("bus needs at least one worker");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

CollectiveBus::CollectiveBus(std::vector<std::size_t> ring_order)
    : order_(std::move(ring_order)) {
  if (order_.empty()) throw ParticipationError("bus needs at least one worker");
  std::vector<bool> seen(order_.size(), false);
  for (const std::size_t w : order_) {
    if (w >= order_.size() || seen[w])
      throw ParticipationError("ring order is not a permutation of worker indices");
    seen[w] = true;
  }
}

CommStats CollectiveBus::stats() const {
  std::lock_guard lock(ledger_mutex_);
  return ledger_;
}

void CollectiveBus::check_participation(std::size_t count, const char* op) const {
  if (count != worker_count())
    throw ParticipationError(std::string(op) + ": expected " +
                             std::to_string(worker_count()) + " contributions, got " +
                             std::to_string(count));
}

std::size_t CollectiveBus::check_vectors(std::span<const Vector> contributions) const {
  check_participation(contributions.size(), "all_reduce");
  const std::size_t d = contributions.front().size();
  for (std::size_t i = 0; i < contributions.size(); ++i) {
    if (contributions[i].size() != d)
      throw DimensionError("all_reduce: worker " + std::to_string(i) + " sent " +
                           std::to_string(contributions[i].size()) +
                           " elements, worker 0 sent " + std::to_string(d));
    if (!kernels::all_finite(contributions[i]))
      throw NumericError("all_reduce: non-finite entry from worker " +
                         std::to_string(i));
  }
  return d;
}

void CollectiveBus::charge_all_reduce(std::size_t elements) {
  std::lock_guard lock(ledger_mutex_);
  ledger_.allreduce_calls += 1;
  ledger_.payload_elements += elements;
}

Vector CollectiveBus::all_reduce_sum(std::span<const Vector> contributions) {
  const std::size_t d = check_vectors(contributions);
  Vector out(d);
  kernels::parallel::ordered_weighted_sum(contributions, {}, order_, out);
  charge_all_reduce(d);
  return out;
}

Vector CollectiveBus::all_reduce_weighted_sum(std::span<const Vector> contributions,
                                              std::span<const double> weights) {
  const std::size_t d = check_vectors(contributions);
  if (weights.size() != contributions.size())
    throw DimensionError("all_reduce: one weight per contribution required");
  if (!kernels::all_finite(weights))
    throw NumericError("all_reduce: non-finite contribution weight");
  Vector out(d);
  kernels::parallel::ordered_weighted_sum(contributions, weights, order_, out);
  charge_all_reduce(d);
  return out;
}

Vector CollectiveBus::all_gather(std::span<const double> contributions) {
  check_participation(contributions.size(), "all_gather");
  if (!kernels::all_finite(contributions))
    throw NumericError("all_gather: non-finite contribution");
  Vector out(contributions.begin(), contributions.end());
  std::lock_guard lock(ledger_mutex_);
  ledger_.allgather_calls += 1;
  ledger_.gather_elements += out.size();
  return out;
}

}  // namespace adacons
