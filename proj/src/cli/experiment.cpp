// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <string>

#include "adacons/cli.hpp"
#include "adacons/errors.hpp"

namespace adacons::cli {

namespace {

std::uint64_t parse_u64(std::string_view text, const char* key) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError(key, "'" + std::string(text) + "' is not a non-negative integer");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* key) {
  if (v.empty()) throw UsageError(key, "needs at least one value");
}

}  // namespace

std::string Cell::file_stem() const {
  return "w" + std::to_string(workers) + "_eb" + std::to_string(effective_batch) + "_" +
         aggregator + "_s" + std::to_string(seed);
}

std::optional<std::string> canonical_aggregator(std::string_view name) {
  if (name == "sum" || name == "average" || name == "avg") return "sum";
  for (const std::string_view label : kAblationLabels)
    if (name == label) return std::string(label);
  if (name == "adacons-norm") return "adacons-normalization";
  return std::nullopt;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const std::string_view part : split(text, ',')) {
    const std::size_t range = part.find("..");
    if (range == std::string_view::npos) {
      seeds.push_back(parse_u64(part, "seeds"));
      continue;
    }
    const std::uint64_t first = parse_u64(part.substr(0, range), "seeds");
    const std::uint64_t last = parse_u64(part.substr(range + 2), "seeds");
    if (last < first) throw UsageError("seeds", "empty range '" + std::string(part) + "'");
    for (std::uint64_t s = first; s <= last; ++s) seeds.push_back(s);
  }
  return seeds;
}

ExperimentMatrix parse_config(const std::vector<std::string>& args) {
  ExperimentMatrix m;
  CLI::App app{"Synchronous data-parallel gradient aggregation simulator"};
  app.set_config("--config", "", "Flat key=value file; keys are flag names");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::vector<std::string> aggregators;
  std::string seeds;
  std::optional<std::uint64_t> seed;
  std::string step = "exact";
  std::string out_dir;
  std::string csv;

  app.add_option("--workers", m.workers, "Worker counts N")->delimiter(',');
  app.add_option("--effective-batch", m.effective_batches,
                 "Effective batch sizes (N x local batch)")
      ->delimiter(',');
  app.add_option("--dim", m.dimension, "Model dimension d");
  app.add_option("--iters", m.iterations, "Iterations per run");
  app.add_option("--aggregator", aggregators,
                 "sum|average|adacons|adacons-raw|adacons-momentum|adacons-normalization")
      ->delimiter(',');
  app.add_option("--beta", m.beta, "EMA factor of the sorted coefficient momentum");
  app.add_option("--seed", seed, "Single seed");
  app.add_option("--seeds", seeds, "Seed list: 1..5 or 1,2,3");
  app.add_option("--step", step, "exact|fixed");
  app.add_option("--lr", m.lr, "Step size for --step fixed");
  app.add_flag("--coeff-stats", m.coefficient_stats, "Record coefficient statistics");
  app.add_flag("--ablation", m.ablation, "Run all AdaCons variants plus the baseline");
  app.add_flag("--parallel-workers", m.parallel_workers,
               "Compute worker gradients as parallel OpenMP tasks");
  app.add_option("--bytes-per-element", m.bytes_per_element,
                 "Bytes per scalar when reporting traffic");
  app.add_option("--out-dir", out_dir, "Output directory")
      ->envname(std::string(kOutputDirEnv));
  app.add_option("--csv", csv, "Trace CSV path for a single-run matrix");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!aggregators.empty()) {
    m.aggregators.clear();
    for (const std::string& name : aggregators) {
      auto label = canonical_aggregator(name);
      if (!label) throw UsageError("aggregator", "unknown aggregator '" + name + "'");
      if (std::find(m.aggregators.begin(), m.aggregators.end(), *label) ==
          m.aggregators.end())
        m.aggregators.push_back(*label);
    }
  }
  if (seed && !seeds.empty()) throw UsageError("seeds", "give either --seed or --seeds");
  if (seed) m.seeds = {*seed};
  if (!seeds.empty()) m.seeds = parse_seed_list(seeds);

  if (step == "exact") {
    m.step_rule = StepRule::exact_line_search;
  } else if (step == "fixed") {
    m.step_rule = StepRule::fixed;
    if (!(m.lr > 0.0)) throw UsageError("lr", "fixed steps need a positive --lr");
  } else {
    throw UsageError("step", "expected 'exact' or 'fixed', got '" + step + "'");
  }
  if (!out_dir.empty()) m.output_dir = out_dir;
  if (!csv.empty()) m.csv_path = csv;

  require_nonempty(m.workers, "workers");
  require_nonempty(m.effective_batches, "effective-batch");
  if (!(m.beta > 0.0 && m.beta < 1.0)) throw UsageError("beta", "must lie in (0, 1)");
  if (m.dimension == 0) throw UsageError("dim", "must be at least 1");
  if (m.iterations == 0) throw UsageError("iters", "must be at least 1");
  if (m.bytes_per_element == 0) throw UsageError("bytes-per-element", "must be positive");
  for (const std::size_t n : m.workers)
    if (n == 0) throw UsageError("workers", "must be at least 1");
  for (const std::size_t n : m.workers)
    for (const std::size_t eb : m.effective_batches)
      if (eb == 0 || eb % n != 0)
        throw UsageError("effective-batch", std::to_string(eb) +
                                                " is not a positive multiple of " +
                                                std::to_string(n) + " workers");
  if (m.csv_path && expand(m).size() != 1)
    throw UsageError("csv", "only valid when the matrix has exactly one run");
  return m;
}

std::vector<Cell> expand(const ExperimentMatrix& m) {
  std::vector<Cell> cells;
  std::vector<std::string> labels = m.aggregators;
  if (m.ablation) labels.assign(std::begin(kAblationLabels), std::end(kAblationLabels));
  for (const std::size_t n : m.workers)
    for (const std::size_t eb : m.effective_batches)
      for (const std::string& label : labels)
        for (const std::uint64_t seed : m.seeds) cells.push_back({n, eb, label, seed});
  return cells;
}

RunConfig run_config_for(const ExperimentMatrix& m, const Cell& cell) {
  RunConfig base;
  base.worker_count = cell.workers;
  base.local_batch = cell.effective_batch / cell.workers;
  base.iterations = m.iterations;
  base.adacons.beta = m.beta;
  base.step_rule = m.step_rule;
  base.fixed_step = m.lr;
  base.record_coefficient_stats = m.coefficient_stats;
  base.execution = m.parallel_workers ? WorkerExecution::parallel : WorkerExecution::sequential;
  return ablation_variant(base, cell.aggregator);
}

}  // namespace adacons::cli
