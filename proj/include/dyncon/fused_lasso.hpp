#pragma once

#include "dyncon/types.hpp"

namespace dyncon {

/// Exact minimizer of (1/2) sum (z_i - y_i)^2 + lambda sum |z_i - z_{i-1}|
/// over the chain (1-d total variation proximal map).
Vector tv_chain_prox(const Vector& y, double lambda);

/// Exact minimizer of
///   sum_i (a/2)(z_i - y_i)^2 + l1 sum_i |z_i| + l2 sum_{i>=2} |z_i - z_{i-1}|.
/// Solves the pure fusion problem first, then soft-thresholds by l1/a
/// (an exact decomposition for the 1-d fused lasso).
Vector fused_lasso_chain(const Vector& y, double a, double l1, double l2);

}  // namespace dyncon
