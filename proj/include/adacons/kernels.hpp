// Copyright 2026 The adacons-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Dense inner loops shared by the collectives, aggregation and problem
// modules. Every kernel exists twice: `serial` is the reference and
// `parallel` distributes independent output elements over OpenMP threads.
// Each output element is accumulated in the same order in both variants, so
// their results are bit-identical for any thread count.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adacons {

using Vector = std::vector<double>;

namespace kernels {

namespace serial {

/// out[j] = sum_k weights[order[k]] * rows[order[k]][j], accumulated in
/// `order`. An empty `weights` means all ones. `out` must be sized to the
/// row length.
void ordered_weighted_sum(std::span<const Vector> rows,
                          std::span<const double> weights,
                          std::span<const std::size_t> order,
                          std::span<double> out);

/// out[i] = <rows[i], v>
void row_dots(std::span<const Vector> rows, std::span<const double> v,
              std::span<double> out);

/// out[i] = ||rows[i]||^2
void row_squared_norms(std::span<const Vector> rows, std::span<double> out);

/// Empirical least-squares gradient (1/B) sum_s (w . x_s) x_s over the B
/// row-major samples in `samples` (B x d).
void batch_gradient(std::span<const double> w, std::span<const double> samples,
                    std::size_t batch_size, std::span<double> out);

}  // namespace serial

namespace parallel {

void ordered_weighted_sum(std::span<const Vector> rows,
                          std::span<const double> weights,
                          std::span<const std::size_t> order,
                          std::span<double> out);
void row_dots(std::span<const Vector> rows, std::span<const double> v,
              std::span<double> out);
void row_squared_norms(std::span<const Vector> rows, std::span<double> out);
void batch_gradient(std::span<const double> w, std::span<const double> samples,
                    std::size_t batch_size, std::span<double> out);

}  // namespace parallel

/// Sequential dot product, left to right.
double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

}  // namespace kernels
}  // namespace adacons
