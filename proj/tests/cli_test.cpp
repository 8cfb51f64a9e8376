// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adacons/cli.hpp"
#include "adacons/errors.hpp"

namespace adacons::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("adacons_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_csv_line(line));
  return rows;
}

// Drops the wall_time_s column, the only non-deterministic field.
std::string without_wall_time(const fs::path& path) {
  std::string out;
  for (auto row : read_csv(path)) {
    row.pop_back();
    for (const auto& f : row) out += f + ",";
    out += "\n";
  }
  return out;
}

std::string usage_key(const std::vector<std::string>& args) {
  try {
    parse_config(args);
  } catch (const UsageError& e) {
    return e.key();
  }
  return "<none>";
}

TEST(ParseConfig, SingleRun) {
  const auto m = parse_config({"--workers", "32", "--effective-batch", "1024", "--dim", "1000",
                               "--iters", "500", "--aggregator", "adacons", "--beta", "0.99",
                               "--seed", "7", "--csv", "out.csv"});
  EXPECT_EQ(m.workers, std::vector<std::size_t>{32});
  EXPECT_EQ(m.effective_batches, std::vector<std::size_t>{1024});
  EXPECT_EQ(m.dimension, 1000u);
  EXPECT_EQ(m.iterations, 500u);
  EXPECT_EQ(m.aggregators, std::vector<std::string>{"adacons"});
  EXPECT_EQ(m.beta, 0.99);
  EXPECT_EQ(m.seeds, std::vector<std::uint64_t>{7});
  ASSERT_TRUE(m.csv_path);
  EXPECT_EQ(*m.csv_path, "out.csv");
  EXPECT_EQ(expand(m).size(), 1u);
  const RunConfig rc = run_config_for(m, expand(m).front());
  EXPECT_EQ(rc.local_batch, 32u);
  EXPECT_EQ(rc.effective_batch(), 1024u);
}

TEST(ParseConfig, CartesianProduct) {
  const auto m = parse_config({"--workers", "8,32", "--effective-batch", "64,1024",
                               "--aggregator", "sum,adacons", "--seeds", "1..5"});
  EXPECT_EQ(m.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(expand(m).size(), 2u * 2u * 2u * 5u);
}

TEST(ParseConfig, ValidationNamesTheKey) {
  EXPECT_EQ(usage_key({"--effective-batch", "10", "--workers", "4"}), "effective-batch");
  EXPECT_EQ(usage_key({"--aggregator", "adasum"}), "aggregator");
  EXPECT_EQ(usage_key({"--beta", "1.0"}), "beta");
  EXPECT_EQ(usage_key({"--beta", "0"}), "beta");
  EXPECT_EQ(usage_key({"--seeds", "5..1"}), "seeds");
  EXPECT_EQ(usage_key({"--step", "newton"}), "step");
  EXPECT_EQ(usage_key({"--step", "fixed"}), "lr");
  EXPECT_EQ(usage_key({"--workers", "2,4", "--effective-batch", "8", "--csv", "x.csv"}), "csv");
  EXPECT_THROW(parse_config({"--no-such-flag"}), UsageError);
}

TEST(ParseConfig, AggregatorAliases) {
  const auto m = parse_config({"--aggregator", "average,adacons-norm,sum"});
  EXPECT_EQ(m.aggregators, (std::vector<std::string>{"sum", "adacons-normalization"}));
}

TEST(ParseConfig, SeedLists) {
  EXPECT_EQ(parse_seed_list("3"), std::vector<std::uint64_t>{3});
  EXPECT_EQ(parse_seed_list("1,4,9"), (std::vector<std::uint64_t>{1, 4, 9}));
  EXPECT_EQ(parse_seed_list("1..2,7"), (std::vector<std::uint64_t>{1, 2, 7}));
  EXPECT_THROW(parse_seed_list("x"), UsageError);
}

TEST(ParseConfig, ConfigFileWithFlagOverride) {
  const fs::path dir = scratch_dir("config");
  const fs::path file = dir / "run.conf";
  std::ofstream(file) << "workers=8\neffective-batch=64\nbeta=0.9\niters=12\n";
  const auto m = parse_config({"--config", file.string(), "--beta", "0.5"});
  EXPECT_EQ(m.workers, std::vector<std::size_t>{8});
  EXPECT_EQ(m.effective_batches, std::vector<std::size_t>{64});
  EXPECT_EQ(m.iterations, 12u);
  EXPECT_EQ(m.beta, 0.5);
}

TEST(ParseConfig, ConfigFileRejectsUnknownKeys) {
  const fs::path dir = scratch_dir("config_unknown");
  const fs::path file = dir / "run.conf";
  std::ofstream(file) << "workers=8\nmystery=3\n";
  try {
    parse_config({"--config", file.string()});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("mystery"), std::string::npos) << e.what();
  }
}

TEST(ParseConfig, OutputDirectoryFromEnvironment) {
  ::setenv(std::string(kOutputDirEnv).c_str(), "/tmp/from_env", 1);
  EXPECT_EQ(parse_config({}).output_dir, "/tmp/from_env");
  EXPECT_EQ(parse_config({"--out-dir", "/tmp/flag"}).output_dir, "/tmp/flag");
  ::unsetenv(std::string(kOutputDirEnv).c_str());
  EXPECT_EQ(parse_config({}).output_dir, "results");
}

TEST(RunMatrix, WritesTracesAndSummaries) {
  const fs::path dir = scratch_dir("matrix");
  const auto m = parse_config({"--workers", "2,4", "--effective-batch", "8", "--dim", "16",
                               "--iters", "6", "--aggregator", "sum,adacons", "--seeds", "1..3",
                               "--coeff-stats", "--out-dir", dir.string()});
  std::ostringstream out, err;
  ASSERT_EQ(run_matrix(m, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("adacons"), std::string::npos);

  for (const Cell& cell : expand(m)) {
    const auto rows = read_csv(dir / (cell.file_stem() + ".csv"));
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], split_csv_line(std::string(kTraceHeader)));
    for (std::size_t r = 1; r < rows.size(); ++r) {
      ASSERT_EQ(rows[r].size(), 13u);
      EXPECT_EQ(std::stoul(rows[r][0]), r);
      EXPECT_GT(std::stod(rows[r][1]), 0.0);
      const bool adacons = cell.aggregator == "adacons";
      EXPECT_EQ(rows[r][2].empty(), !adacons);  // coefficient stats
      EXPECT_EQ(rows[r][8].empty(), !adacons || rows[r][9] == "1");  // lambda
      EXPECT_EQ(std::stoul(rows[r][10]), adacons ? 32u : 16u);
      EXPECT_EQ(std::stoul(rows[r][11]), adacons ? cell.workers : 0u);
      EXPECT_GE(std::stod(rows[r][12]), 0.0);
    }
  }

  const auto summary = read_csv(dir / "summary.csv");
  EXPECT_EQ(summary[0], split_csv_line(std::string(kSummaryHeader)));
  EXPECT_EQ(summary.size(), 1u + expand(m).size());

  const auto comparison = read_csv(dir / "comparison.csv");
  EXPECT_EQ(comparison[0], split_csv_line(std::string(kComparisonHeader)));
  ASSERT_EQ(comparison.size(), 5u);
  for (std::size_t r = 1; r < comparison.size(); ++r) {
    EXPECT_EQ(comparison[r][3], "3");
    EXPECT_FALSE(comparison[r][6].empty());  // wall-time ratio vs sum
    if (comparison[r][2] == "sum") EXPECT_EQ(std::stod(comparison[r][6]), 1.0);
  }
}

TEST(RunMatrix, CoefficientColumnsEmptyWithoutFlag) {
  const fs::path dir = scratch_dir("nostats");
  const auto m = parse_config({"--workers", "2", "--effective-batch", "4", "--dim", "8",
                               "--iters", "3", "--out-dir", dir.string()});
  std::ostringstream out, err;
  ASSERT_EQ(run_matrix(m, out, err), 0);
  const auto rows = read_csv(dir / (expand(m).front().file_stem() + ".csv"));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    for (std::size_t c = 2; c < 8; ++c) EXPECT_TRUE(rows[r][c].empty());
    EXPECT_FALSE(rows[r][8].empty());
  }
}

TEST(RunMatrix, RerunIsIdenticalApartFromWallTime) {
  const fs::path dir = scratch_dir("rerun");
  const auto m = parse_config({"--workers", "3", "--effective-batch", "9", "--dim", "12",
                               "--iters", "5", "--ablation", "--coeff-stats", "--out-dir",
                               dir.string()});
  std::ostringstream out, err;
  ASSERT_EQ(run_matrix(m, out, err), 0);
  std::vector<std::string> first;
  for (const Cell& cell : expand(m))
    first.push_back(without_wall_time(dir / (cell.file_stem() + ".csv")));
  ASSERT_EQ(first.size(), 5u);
  ASSERT_EQ(run_matrix(m, out, err), 0);
  std::size_t i = 0;
  for (const Cell& cell : expand(m))
    EXPECT_EQ(first[i++], without_wall_time(dir / (cell.file_stem() + ".csv")));
}

TEST(RunMatrix, CsvPathForSingleRun) {
  const fs::path dir = scratch_dir("single");
  const fs::path csv = dir / "nested" / "trace.csv";
  const auto m = parse_config({"--workers", "2", "--effective-batch", "4", "--dim", "8",
                               "--iters", "4", "--out-dir", dir.string(), "--csv", csv.string()});
  std::ostringstream out, err;
  ASSERT_EQ(run_matrix(m, out, err), 0);
  EXPECT_EQ(read_csv(csv).size(), 5u);
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
}

TEST(RunCli, ExitCodes) {
  const fs::path dir = scratch_dir("exit");
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"--effective-batch", "10", "--workers", "4"}, out, err), 1);
  EXPECT_NE(err.str().find("effective-batch"), std::string::npos);
  EXPECT_EQ(run_cli({"--help"}, out, err), 0);
  EXPECT_EQ(run_cli({"--workers", "2", "--effective-batch", "4", "--dim", "8", "--iters", "2",
                     "--out-dir", dir.string()},
                    out, err),
            0);
  err.str("");
  EXPECT_EQ(run_cli({"--workers", "2", "--effective-batch", "4", "--dim", "8", "--iters", "3",
                     "--step", "fixed", "--lr", "1e200", "--aggregator", "sum", "--out-dir",
                     dir.string()},
                    out, err),
            2);
  EXPECT_NE(err.str().find("iteration="), std::string::npos);
}

}  // namespace
}  // namespace adacons::cli
