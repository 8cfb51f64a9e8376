// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "adacons/random.hpp"

#include <cmath>
#include <numbers>

namespace adacons {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t KeyedStream::mix(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

KeyedStream::KeyedStream(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    : key_(mix(mix(mix(seed + kGolden) ^ (a + 1) * kGolden) ^ (b + 1) * 0xD1B54A32D192ED03ULL)) {}

std::uint64_t KeyedStream::next_u64() noexcept {
  return mix(key_ + kGolden * ++counter_);
}

double KeyedStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace adacons
