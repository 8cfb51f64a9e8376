// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Synchronous data-parallel training loop over the simulated bus.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adacons/aggregation.hpp"
#include "adacons/collectives.hpp"
#include "adacons/problems.hpp"

namespace adacons {

enum class AggregatorKind { average, adacons };
enum class StepRule { exact_line_search, fixed };

/// How the per-iteration worker gradients are computed. All modes produce
/// bit-identical traces; the non-default ones exist to demonstrate that.
enum class WorkerExecution { sequential, reversed, parallel };

struct RunConfig {
  std::size_t worker_count = 1;
  std::size_t local_batch = 1;
  std::size_t iterations = 1;
  AggregatorKind aggregator = AggregatorKind::adacons;
  AdaConsConfig adacons;
  StepRule step_rule = StepRule::exact_line_search;
  double fixed_step = 0.0;  // used only with StepRule::fixed
  bool record_coefficient_stats = false;
  bool record_batch_digest = false;
  WorkerExecution execution = WorkerExecution::sequential;
  /// Test hook: every worker draws worker 0's batch.
  bool share_batches = false;

  std::size_t effective_batch() const noexcept { return worker_count * local_batch; }
  void validate() const;
};

struct StageStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

struct CoefficientStats {
  StageStats raw;
  StageStats smoothed;
  StageStats normalized;
};

StageStats stage_stats(std::span<const double> values);

struct TraceRecord {
  std::size_t iteration = 0;  // 1-based
  double objective = 0.0;     // exact loss after the update
  double step = 0.0;
  std::optional<CoefficientStats> coefficients;
  std::optional<double> lambda;  // AdaCons only; absent on uniform fallback
  bool fallback = false;
  CommStats comm;  // ledger delta of this iteration
  double wall_time_s = 0.0;
  std::uint64_t batch_digest = 0;  // 0 unless record_batch_digest
};

struct TrainTrace {
  double initial_objective = 0.0;
  std::vector<TraceRecord> records;

  double final_objective() const {
    return records.empty() ? initial_objective : records.back().objective;
  }
  std::size_t fallback_count() const;
  CommStats total_comm() const;
  double mean_wall_time_s() const;
};

/// Everything in two traces except wall time is equal bit for bit.
bool same_trajectory(const TrainTrace& a, const TrainTrace& b);

/// Runs `config.iterations` synchronous steps. Throws NumericAbort when the
/// direction, a gradient or the objective goes non-finite.
TrainTrace run(const RunConfig& config, const ProblemSpec& spec);

struct LabeledTrace {
  std::string label;
  RunConfig config;
  TrainTrace trace;
};

/// Labels in the order they are produced by run_ablation_matrix.
inline constexpr std::string_view kAblationLabels[] = {
    "sum", "adacons-raw", "adacons-momentum", "adacons-normalization", "adacons"};

/// Configuration of one ablation variant derived from `base`.
RunConfig ablation_variant(const RunConfig& base, std::string_view label);

/// The baseline plus the four AdaCons variants (momentum x normalization),
/// all on the same batch streams.
std::vector<LabeledTrace> run_ablation_matrix(const RunConfig& base,
                                              const ProblemSpec& spec);

}  // namespace adacons
