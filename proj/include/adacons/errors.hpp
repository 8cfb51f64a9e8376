// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adacons {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vectors that must share a length do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A collective was called with the wrong number of worker contributions.
class ParticipationError : public Error {
 public:
  using Error::Error;
};

/// A NaN or infinity reached a place that requires finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value. `key()` names the offending setting when
/// one can be identified.
class UsageError : public Error {
 public:
  UsageError(std::string key, const std::string& message)
      : Error("--" + key + ": " + message), key_(std::move(key)) {}
  explicit UsageError(const std::string& message) : Error(message) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Training diverged. Carries the iteration and the quantity that went
/// non-finite so the caller can print a diagnostic record.
class NumericAbort : public Error {
 public:
  NumericAbort(std::size_t iteration, std::string quantity)
      : Error("numeric abort at iteration " + std::to_string(iteration) +
              ": non-finite " + quantity),
        iteration_(iteration),
        quantity_(std::move(quantity)) {}

  std::size_t iteration() const noexcept { return iteration_; }
  const std::string& quantity() const noexcept { return quantity_; }

 private:
  std::size_t iteration_;
  std::string quantity_;
};

}  // namespace adacons
