// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "adacons/engine.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>

#include "adacons/errors.hpp"
#include "adacons/random.hpp"

namespace adacons {

namespace {

struct WorkerOutput {
  Vector gradient;
  std::uint64_t digest = 0;
};

WorkerOutput compute_worker(const RunConfig& config, const ProblemSpec& spec,
                            std::span<const double> w, std::size_t worker,
                            std::size_t iteration) {
  const std::size_t stream = config.share_batches ? 0 : worker;
  const Batch batch = sample_batch(spec, stream, iteration, config.local_batch);
  WorkerOutput out{local_gradient(w, batch), 0};
  if (config.record_batch_digest) out.digest = batch_digest(batch);
  return out;
}

std::vector<WorkerOutput> compute_workers(const RunConfig& config, const ProblemSpec& spec,
                                          std::span<const double> w,
                                          std::size_t iteration) {
  const std::size_t n = config.worker_count;
  std::vector<WorkerOutput> outputs(n);
  switch (config.execution) {
    case WorkerExecution::sequential:
      for (std::size_t i = 0; i < n; ++i)
        outputs[i] = compute_worker(config, spec, w, i, iteration);
      break;
    case WorkerExecution::reversed:
      for (std::size_t i = n; i-- > 0;)
        outputs[i] = compute_worker(config, spec, w, i, iteration);
      break;
    case WorkerExecution::parallel: {
      const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
      for (std::int64_t i = 0; i < count; ++i)
        outputs[i] = compute_worker(config, spec, w, static_cast<std::size_t>(i), iteration);
      break;
    }
  }
  return outputs;
}

}  // namespace

void RunConfig::validate() const {
  if (worker_count == 0) throw UsageError("workers", "must be at least 1");
  if (local_batch == 0) throw UsageError("effective-batch", "local batch must be at least 1");
  if (iterations == 0) throw UsageError("iters", "must be at least 1");
  if (step_rule == StepRule::fixed && !std::isfinite(fixed_step))
    throw UsageError("lr", "must be finite");
  adacons.validate();
}

StageStats stage_stats(std::span<const double> values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (const double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

std::size_t TrainTrace::fallback_count() const {
  std::size_t count = 0;
  for (const auto& r : records) count += r.fallback ? 1 : 0;
  return count;
}

CommStats TrainTrace::total_comm() const {
  CommStats total;
  for (const auto& r : records) total += r.comm;
  return total;
}

double TrainTrace::mean_wall_time_s() const {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.wall_time_s;
  return sum / static_cast<double>(records.size());
}

namespace {

bool same_stage(const StageStats& a, const StageStats& b) {
  return a.mean == b.mean && a.std == b.std;
}

bool same_record(const TraceRecord& a, const TraceRecord& b) {
  if (a.coefficients.has_value() != b.coefficients.has_value()) return false;
  if (a.coefficients) {
    const auto& x = *a.coefficients;
    const auto& y = *b.coefficients;
    if (!same_stage(x.raw, y.raw) || !same_stage(x.smoothed, y.smoothed) ||
        !same_stage(x.normalized, y.normalized))
      return false;
  }
  return a.iteration == b.iteration && a.objective == b.objective && a.step == b.step &&
         a.lambda == b.lambda && a.fallback == b.fallback && a.comm == b.comm &&
         a.batch_digest == b.batch_digest;
}

}  // namespace

bool same_trajectory(const TrainTrace& a, const TrainTrace& b) {
  if (a.initial_objective != b.initial_objective || a.records.size() != b.records.size())
    return false;
  for (std::size_t t = 0; t < a.records.size(); ++t)
    if (!same_record(a.records[t], b.records[t])) return false;
  return true;
}

TrainTrace run(const RunConfig& config, const ProblemSpec& spec) {
  config.validate();
  spec.validate();

  using Clock = std::chrono::steady_clock;
  const std::size_t n = config.worker_count;
  CollectiveBus bus(n);
  MomentumState momentum(n, config.adacons.beta);
  Vector w = initial_point(spec);

  TrainTrace trace;
  trace.initial_objective = true_objective(w);
  trace.records.reserve(config.iterations);

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const auto started = Clock::now();
    const CommStats before = bus.stats();
    TraceRecord record;
    record.iteration = t;

    std::vector<WorkerOutput> outputs = compute_workers(config, spec, w, t);
    std::vector<Vector> gradients;
    gradients.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!kernels::all_finite(outputs[i].gradient))
        throw NumericAbort(t, "gradient of worker " + std::to_string(i));
      if (config.record_batch_digest)
        record.batch_digest = KeyedStream::mix(record.batch_digest ^ outputs[i].digest);
      gradients.push_back(std::move(outputs[i].gradient));
    }
    const GradientSet grads(std::move(gradients));

    Vector direction;
    if (config.aggregator == AggregatorKind::average) {
      direction = aggregate_average(grads, bus);
    } else {
      AdaConsResult result = aggregate_adacons(grads, momentum, config.adacons, bus);
      direction = std::move(result.direction);
      const Coefficients& c = result.coefficients;
      record.fallback = c.fallback;
      if (!c.fallback) record.lambda = c.lambda;
      if (config.record_coefficient_stats)
        record.coefficients = CoefficientStats{
            stage_stats(c.raw), stage_stats(c.smoothed), stage_stats(c.normalized)};
    }
    if (!kernels::all_finite(direction)) throw NumericAbort(t, "aggregated direction");

    record.step = config.step_rule == StepRule::exact_line_search
                      ? exact_line_search(w, direction)
                      : config.fixed_step;
    if (!std::isfinite(record.step)) throw NumericAbort(t, "step size");
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= record.step * direction[j];

    record.objective = true_objective(w);
    if (!std::isfinite(record.objective)) throw NumericAbort(t, "objective");
    record.comm = bus.stats() - before;
    record.wall_time_s = std::chrono::duration<double>(Clock::now() - started).count();
    trace.records.push_back(record);
  }
  return trace;
}

RunConfig ablation_variant(const RunConfig& base, std::string_view label) {
  RunConfig config = base;
  config.aggregator = AggregatorKind::adacons;
  if (label == "sum") {
    config.aggregator = AggregatorKind::average;
  } else if (label == "adacons-raw") {
    config.adacons.use_momentum = false;
    config.adacons.use_normalization = false;
  } else if (label == "adacons-momentum") {
    config.adacons.use_momentum = true;
    config.adacons.use_normalization = false;
  } else if (label == "adacons-normalization") {
    config.adacons.use_momentum = false;
    config.adacons.use_normalization = true;
  } else if (label == "adacons") {
    config.adacons.use_momentum = true;
    config.adacons.use_normalization = true;
  } else {
    throw UsageError("aggregator", "unknown variant '" + std::string(label) + "'");
  }
  return config;
}

std::vector<LabeledTrace> run_ablation_matrix(const RunConfig& base,
                                              const ProblemSpec& spec) {
  std::vector<LabeledTrace> traces;
  for (const std::string_view label : kAblationLabels) {
    RunConfig config = ablation_variant(base, label);
    TrainTrace trace = run(config, spec);
    traces.push_back({std::string(label), std::move(config), std::move(trace)});
  }
  return traces;
}

}  // namespace adacons
