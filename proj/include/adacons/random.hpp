// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace adacons {

/// Counter-based generator: the n-th draw of a stream is a pure function of
/// (key, n), so streams keyed by (seed, worker, iteration) never depend on
/// how many workers exist or in which order they run. Uses the SplitMix64
/// finalizer as the bijective mixer.
class KeyedStream {
 public:
  KeyedStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;

  static std::uint64_t mix(std::uint64_t x) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace adacons
