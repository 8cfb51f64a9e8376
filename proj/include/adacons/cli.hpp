// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment sweeps over workers x effective batch x aggregator x seed, and
// the CSV files they produce.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adacons/engine.hpp"

namespace adacons::cli {

inline constexpr std::string_view kOutputDirEnv = "ADACONS_OUT_DIR";

inline constexpr std::string_view kTraceHeader =
    "iteration,objective,coeff_mean_raw,coeff_std_raw,coeff_mean_smoothed,"
    "coeff_std_smoothed,coeff_mean_norm,coeff_std_norm,lambda,fallback,"
    "allreduce_elems,allgather_elems,wall_time_s";

inline constexpr std::string_view kSummaryHeader =
    "workers,effective_batch,aggregator,seed,final_objective,mean_wall_time_s,"
    "allreduce_elems,allgather_elems,fallback_count";

inline constexpr std::string_view kComparisonHeader =
    "workers,effective_batch,aggregator,seeds,median_final_objective,"
    "median_wall_time_s,wall_time_ratio_vs_sum,comm_bytes_per_iter";

struct ExperimentMatrix {
  std::vector<std::size_t> workers{32};
  std::vector<std::size_t> effective_batches{1024};
  std::vector<std::string> aggregators{"adacons"};  // canonical variant labels
  std::vector<std::uint64_t> seeds{0};
  std::size_t dimension = 1000;
  std::size_t iterations = 500;
  double beta = 0.99;
  StepRule step_rule = StepRule::exact_line_search;
  double lr = 0.0;
  bool coefficient_stats = false;
  bool ablation = false;  // run the full variant set per (N, batch, seed)
  bool parallel_workers = false;
  std::size_t bytes_per_element = 8;
  std::filesystem::path output_dir = "results";
  std::optional<std::filesystem::path> csv_path;  // single-run matrices only
};

/// One (N, effective batch, aggregator, seed) combination.
struct Cell {
  std::size_t workers = 0;
  std::size_t effective_batch = 0;
  std::string aggregator;
  std::uint64_t seed = 0;

  std::string file_stem() const;
};

/// Maps user spellings onto ablation labels ("average" -> "sum").
std::optional<std::string> canonical_aggregator(std::string_view name);

/// Parses "1..5", "3" or "1,4,9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

/// Thrown by parse_config for --help; carries the rendered usage text.
struct HelpRequested {
  std::string text;
};

/// Command-line tokens (without the program name). Flags override values
/// from `--config FILE` (flat key=value lines using the flag names); the
/// output directory may also come from $ADACONS_OUT_DIR. Throws UsageError.
ExperimentMatrix parse_config(const std::vector<std::string>& args);

std::vector<Cell> expand(const ExperimentMatrix& matrix);

RunConfig run_config_for(const ExperimentMatrix& matrix, const Cell& cell);

void write_trace_csv(std::ostream& out, const TrainTrace& trace);
void write_trace_csv(const std::filesystem::path& path, const TrainTrace& trace);

/// Runs every cell, writes one CSV per cell plus summary.csv and
/// comparison.csv, and prints a comparison table to `out`. Returns the
/// process exit status: 0 success, 2 numeric abort.
int run_matrix(const ExperimentMatrix& matrix, std::ostream& out, std::ostream& err);

/// Full front end. Exit status 0 success, 1 usage error, 2 numeric abort.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adacons::cli
