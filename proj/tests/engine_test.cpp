// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "adacons/engine.hpp"
#include "adacons/errors.hpp"

namespace adacons {
namespace {

RunConfig small_config(AggregatorKind kind, std::size_t workers = 4) {
  RunConfig c;
  c.worker_count = workers;
  c.local_batch = 8;
  c.iterations = 30;
  c.aggregator = kind;
  return c;
}

const ProblemSpec kSpec{64, ProblemKind::linear_regression, 5};

TEST(RunConfig, Validation) {
  RunConfig c = small_config(AggregatorKind::adacons);
  EXPECT_EQ(c.effective_batch(), 32u);
  c.worker_count = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config(AggregatorKind::adacons);
  c.iterations = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = small_config(AggregatorKind::adacons);
  c.adacons.beta = 0.0;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Run, ProducesOneRecordPerIteration) {
  const TrainTrace trace = run(small_config(AggregatorKind::adacons), kSpec);
  ASSERT_EQ(trace.records.size(), 30u);
  for (std::size_t t = 0; t < 30; ++t) {
    EXPECT_EQ(trace.records[t].iteration, t + 1);
    EXPECT_TRUE(std::isfinite(trace.records[t].objective));
  }
  EXPECT_LT(trace.final_objective(), trace.initial_objective);
}

TEST(Run, SingleWorkerAggregatorsCoincide) {
  const TrainTrace avg = run(small_config(AggregatorKind::average, 1), kSpec);
  const TrainTrace ada = run(small_config(AggregatorKind::adacons, 1), kSpec);
  for (std::size_t t = 0; t < avg.records.size(); ++t)
    EXPECT_EQ(avg.records[t].objective, ada.records[t].objective) << "iteration " << t + 1;
}

TEST(Run, SharedBatchesCollapseToAveraging) {
  RunConfig a = small_config(AggregatorKind::average, 6);
  RunConfig b = small_config(AggregatorKind::adacons, 6);
  a.share_batches = b.share_batches = true;
  const TrainTrace avg = run(a, kSpec);
  const TrainTrace ada = run(b, kSpec);
  for (std::size_t t = 0; t < avg.records.size(); ++t)
    EXPECT_NEAR(avg.records[t].objective, ada.records[t].objective, 1e-10);
}

TEST(Run, BitReproducible) {
  RunConfig c = small_config(AggregatorKind::adacons);
  c.record_coefficient_stats = true;
  c.record_batch_digest = true;
  EXPECT_TRUE(same_trajectory(run(c, kSpec), run(c, kSpec)));
}

TEST(Run, WorkerExecutionOrderDoesNotChangeTrace) {
  RunConfig c = small_config(AggregatorKind::adacons, 7);
  c.record_coefficient_stats = true;
  c.record_batch_digest = true;
  const TrainTrace reference = run(c, kSpec);
  for (const WorkerExecution mode : {WorkerExecution::reversed, WorkerExecution::parallel}) {
    c.execution = mode;
    EXPECT_TRUE(same_trajectory(reference, run(c, kSpec)));
  }
}

TEST(Run, LedgerPerIteration) {
  const std::size_t d = kSpec.dimension;
  for (const TraceRecord& r : run(small_config(AggregatorKind::adacons), kSpec).records)
    EXPECT_EQ(r.comm, (CommStats{2, 1, 2 * d, 4}));
  for (const TraceRecord& r : run(small_config(AggregatorKind::average), kSpec).records)
    EXPECT_EQ(r.comm, (CommStats{1, 0, d, 0}));
}

TEST(Run, ExactLineSearchDescendsMonotonically) {
  for (const AggregatorKind kind : {AggregatorKind::average, AggregatorKind::adacons}) {
    const TrainTrace trace = run(small_config(kind, 5), kSpec);
    double previous = trace.initial_objective;
    for (const TraceRecord& r : trace.records) {
      EXPECT_LE(r.objective, previous * (1.0 + 1e-12));
      previous = r.objective;
    }
  }
}

TEST(Run, CoefficientStatsAreGated) {
  RunConfig c = small_config(AggregatorKind::adacons);
  for (const TraceRecord& r : run(c, kSpec).records) EXPECT_FALSE(r.coefficients);
  c.record_coefficient_stats = true;
  for (const TraceRecord& r : run(c, kSpec).records) {
    ASSERT_TRUE(r.coefficients);
    if (!r.fallback) EXPECT_NEAR(r.coefficients->normalized.mean * 4.0, 1.0, 1e-9);
  }
  c.aggregator = AggregatorKind::average;
  for (const TraceRecord& r : run(c, kSpec).records) {
    EXPECT_FALSE(r.coefficients);
    EXPECT_FALSE(r.lambda);
  }
}

TEST(Run, FixedStepDivergenceAborts) {
  RunConfig c = small_config(AggregatorKind::average);
  c.step_rule = StepRule::fixed;
  c.fixed_step = 1e200;
  try {
    run(c, kSpec);
    FAIL() << "expected NumericAbort";
  } catch (const NumericAbort& abort) {
    EXPECT_GE(abort.iteration(), 1u);
    EXPECT_FALSE(abort.quantity().empty());
  }
}

TEST(Run, FixedStepUsesConfiguredEta) {
  RunConfig c = small_config(AggregatorKind::average);
  c.step_rule = StepRule::fixed;
  c.fixed_step = 0.01;
  for (const TraceRecord& r : run(c, kSpec).records) EXPECT_EQ(r.step, 0.01);
}

TEST(AblationMatrix, FiveVariantsOnSharedBatches) {
  RunConfig base = small_config(AggregatorKind::adacons);
  base.record_batch_digest = true;
  base.record_coefficient_stats = true;
  const auto traces = run_ablation_matrix(base, kSpec);
  ASSERT_EQ(traces.size(), 5u);
  for (std::size_t v = 0; v < 5; ++v) EXPECT_EQ(traces[v].label, kAblationLabels[v]);

  for (std::size_t t = 0; t < base.iterations; ++t) {
    const auto digest = traces[0].trace.records[t].batch_digest;
    EXPECT_NE(digest, 0u);
    for (const auto& lt : traces) EXPECT_EQ(lt.trace.records[t].batch_digest, digest);
  }

  const RunConfig& raw = traces[1].config;
  EXPECT_FALSE(raw.adacons.use_momentum);
  EXPECT_FALSE(raw.adacons.use_normalization);
  EXPECT_EQ(raw.adacons.fallback_lambda, 1.0);
  for (const TraceRecord& r : traces[1].trace.records) EXPECT_EQ(r.lambda, 1.0);

  const RunConfig& full = traces[4].config;
  const AdaConsConfig defaults;
  EXPECT_EQ(full.aggregator, AggregatorKind::adacons);
  EXPECT_EQ(full.adacons.use_momentum, defaults.use_momentum);
  EXPECT_EQ(full.adacons.use_normalization, defaults.use_normalization);
  EXPECT_EQ(full.adacons.beta, defaults.beta);
  EXPECT_EQ(traces[0].config.aggregator, AggregatorKind::average);
}

TEST(AblationMatrix, UnknownLabelIsUsageError) {
  EXPECT_THROW(ablation_variant(RunConfig{}, "adasum"), UsageError);
}

TEST(StageStats, MeanAndPopulationStd) {
  const StageStats s = stage_stats(Vector{1.0, 3.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.std, 1.0);
}

}  // namespace
}  // namespace adacons
