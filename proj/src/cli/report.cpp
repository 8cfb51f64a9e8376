// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <tuple>

#include "adacons/cli.hpp"
#include "adacons/errors.hpp"

namespace adacons::cli {

namespace {

struct CellResult {
  Cell cell;
  TrainTrace trace;
};

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw Error("cannot open '" + path.string() + "' for writing");
  return file;
}

std::vector<CellResult> execute(const ExperimentMatrix& m) {
  std::vector<CellResult> results;
  if (!m.ablation) {
    for (const Cell& cell : expand(m)) {
      ProblemSpec spec{m.dimension, ProblemKind::linear_regression, cell.seed};
      results.push_back({cell, run(run_config_for(m, cell), spec)});
    }
    return results;
  }
  for (const std::size_t n : m.workers)
    for (const std::size_t eb : m.effective_batches)
      for (const std::uint64_t seed : m.seeds) {
        const Cell base_cell{n, eb, "adacons", seed};
        ProblemSpec spec{m.dimension, ProblemKind::linear_regression, seed};
        for (LabeledTrace& lt : run_ablation_matrix(run_config_for(m, base_cell), spec))
          results.push_back({Cell{n, eb, lt.label, seed}, std::move(lt.trace)});
      }
  return results;
}

void write_summary(const std::filesystem::path& path, const std::vector<CellResult>& results) {
  auto file = open_for_writing(path);
  file << kSummaryHeader << '\n';
  for (const auto& [cell, trace] : results) {
    const CommStats comm = trace.total_comm();
    fmt::print(file, "{},{},{},{},{},{},{},{},{}\n", cell.workers, cell.effective_batch,
               cell.aggregator, cell.seed, trace.final_objective(),
               trace.mean_wall_time_s(), comm.payload_elements, comm.gather_elements,
               trace.fallback_count());
  }
}

struct GroupSummary {
  std::size_t workers;
  std::size_t effective_batch;
  std::string aggregator;
  std::size_t seeds;
  double median_objective;
  double median_wall_time;
  std::optional<double> slowdown;
  double bytes_per_iter;
};

std::vector<GroupSummary> summarize(const ExperimentMatrix& m,
                                    const std::vector<CellResult>& results) {
  using Key = std::tuple<std::size_t, std::size_t, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const CellResult*>> groups;
  for (const CellResult& r : results) {
    Key key{r.cell.workers, r.cell.effective_batch, r.cell.aggregator};
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(&r);
  }

  std::vector<GroupSummary> out;
  for (const Key& key : order) {
    const auto& members = groups[key];
    std::vector<double> objectives, times;
    for (const CellResult* r : members) {
      objectives.push_back(r->trace.final_objective());
      times.push_back(r->trace.mean_wall_time_s());
    }
    const CommStats comm = members.front()->trace.total_comm();
    const double elements_per_iter =
        static_cast<double>(comm.payload_elements + comm.gather_elements) /
        static_cast<double>(members.front()->trace.records.size());
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), members.size(),
                   median(objectives), median(times), std::nullopt,
                   elements_per_iter * static_cast<double>(m.bytes_per_element)});
  }
  for (GroupSummary& g : out) {
    for (const GroupSummary& base : out)
      if (base.aggregator == "sum" && base.workers == g.workers &&
          base.effective_batch == g.effective_batch && base.median_wall_time > 0.0)
        g.slowdown = g.median_wall_time / base.median_wall_time;
  }
  return out;
}

void write_comparison(const std::filesystem::path& path,
                      const std::vector<GroupSummary>& groups) {
  auto file = open_for_writing(path);
  file << kComparisonHeader << '\n';
  for (const GroupSummary& g : groups)
    fmt::print(file, "{},{},{},{},{},{},{},{}\n", g.workers, g.effective_batch,
               g.aggregator, g.seeds, g.median_objective, g.median_wall_time,
               g.slowdown ? fmt::format("{}", *g.slowdown) : std::string(),
               g.bytes_per_iter);
}

void print_table(std::ostream& out, const std::vector<GroupSummary>& groups) {
  fmt::print(out, "{:>6} {:>8} {:<22} {:>5} {:>16} {:>12} {:>9} {:>12}\n", "N", "EB",
             "aggregator", "seeds", "median final", "ms/iter", "slowdown", "KiB/iter");
  for (const GroupSummary& g : groups)
    fmt::print(out, "{:>6} {:>8} {:<22} {:>5} {:>16.6e} {:>12.3f} {:>9} {:>12.2f}\n",
               g.workers, g.effective_batch, g.aggregator, g.seeds, g.median_objective,
               1e3 * g.median_wall_time,
               g.slowdown ? fmt::format("{:.3f}x", *g.slowdown) : std::string("-"),
               g.bytes_per_iter / 1024.0);
}

void write_optional(std::ostream& out, const std::optional<double>& value) {
  if (value) fmt::print(out, "{}", *value);
}

}  // namespace

void write_trace_csv(std::ostream& out, const TrainTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    fmt::print(out, "{},{},", r.iteration, r.objective);
    if (r.coefficients) {
      const auto& c = *r.coefficients;
      fmt::print(out, "{},{},{},{},{},{},", c.raw.mean, c.raw.std, c.smoothed.mean,
                 c.smoothed.std, c.normalized.mean, c.normalized.std);
    } else {
      out << ",,,,,,";
    }
    write_optional(out, r.lambda);
    fmt::print(out, ",{},{},{},{}\n", r.fallback ? 1 : 0, r.comm.payload_elements,
               r.comm.gather_elements, r.wall_time_s);
  }
}

void write_trace_csv(const std::filesystem::path& path, const TrainTrace& trace) {
  auto file = open_for_writing(path);
  write_trace_csv(file, trace);
}

int run_matrix(const ExperimentMatrix& m, std::ostream& out, std::ostream& err) {
  std::vector<CellResult> results;
  try {
    results = execute(m);
  } catch (const NumericAbort& abort) {
    fmt::print(err, "numeric abort: iteration={} quantity=\"{}\"\n", abort.iteration(),
               abort.quantity());
    return 2;
  }

  for (const CellResult& r : results) {
    const auto path = m.csv_path ? *m.csv_path : m.output_dir / (r.cell.file_stem() + ".csv");
    write_trace_csv(path, r.trace);
  }
  write_summary(m.output_dir / "summary.csv", results);
  const auto groups = summarize(m, results);
  write_comparison(m.output_dir / "comparison.csv", groups);
  print_table(out, groups);
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentMatrix matrix;
  try {
    matrix = parse_config(args);
  } catch (const HelpRequested& help) {
    out << help.text;
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }
  try {
    return run_matrix(matrix, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace adacons::cli
