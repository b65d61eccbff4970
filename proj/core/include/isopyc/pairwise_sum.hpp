#pragma once

#include <span>

namespace isopyc {

/// Fixed-order pairwise (tree) summation. Deterministic for a given input
/// order, so reductions stay bit-identical run to run.
double pairwise_sum(std::span<const double> v);

/// Pairwise sum of elementwise products a[i]*b[i].
double pairwise_dot(std::span<const double> a, std::span<const double> b);

} // namespace isopyc
