// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

// In-process stand-in for the synchronous collectives of a data-parallel job.
// Nothing travels over a network; instead every call is charged to a ledger
// that counts scalar elements, which is the quantity the cost model is
// stated in.

#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <vector>

#include "adacons/kernels.hpp"

namespace adacons {

struct CommStats {
  std::uint64_t allreduce_calls = 0;
  std::uint64_t allgather_calls = 0;
  std::uint64_t payload_elements = 0;  // moved through all-reduce
  std::uint64_t gather_elements = 0;   // moved through all-gather

  /// Delta between two snapshots of the same monotone ledger.
  CommStats operator-(const CommStats& earlier) const;
  CommStats& operator+=(const CommStats& other);
  bool operator==(const CommStats&) const = default;
};

class CollectiveBus {
 public:
  /// Bus whose ring visits workers in index order 0, 1, ..., N-1.
  explicit CollectiveBus(std::size_t worker_count);

  /// Bus with an explicit ring. `ring_order` must be a permutation of
  /// 0..N-1; reductions accumulate contributions in that order.
  explicit CollectiveBus(std::vector<std::size_t> ring_order);

  CollectiveBus(const CollectiveBus&) = delete;
  CollectiveBus& operator=(const CollectiveBus&) = delete;

  std::size_t worker_count() const noexcept { return order_.size(); }
  std::span<const std::size_t> reduction_order() const noexcept { return order_; }

  /// Snapshot of the ledger.
  CommStats stats() const;

  /// Elementwise sum of one length-d vector per worker. Charged as one
  /// all-reduce of d elements.
  Vector all_reduce_sum(std::span<const Vector> contributions);

  /// Each worker scales its own vector by `weights[i]` before contributing;
  /// the reduction itself is an ordinary all-reduce of d elements.
  Vector all_reduce_weighted_sum(std::span<const Vector> contributions,
                                 std::span<const double> weights);

  /// Concatenates one scalar per worker in worker-index order.
  Vector all_gather(std::span<const double> contributions);

 private:
  std::size_t check_vectors(std::span<const Vector> contributions) const;
  void check_participation(std::size_t count, const char* op) const;
  void charge_all_reduce(std::size_t elements);

  std::vector<std::size_t> order_;
  mutable std::mutex ledger_mutex_;
  CommStats ledger_;
};

}  // namespace adacons
