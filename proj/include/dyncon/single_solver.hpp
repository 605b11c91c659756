#pragma once

#include <utility>
#include <vector>

#include "dyncon/covariance.hpp"
#include "dyncon/types.hpp"

namespace dyncon {

/// Entries with absolute value above this are part of the estimated support.
inline constexpr double kSupportEps = 1e-8;

struct SolverConfig {
    double lambda1 = 0.1;  // sparsity weight
    double lambda2 = 0.1;  // fusion weight
    double rho = 1.0;      // ADMM penalty
    double eps_abs = 1e-5;
    double eps_rel = 1e-5;
    int max_iter = 2000;
    bool penalize_diagonal = false;  // include the diagonal in the l1 term
    bool adaptive_rho = false;       // rescale rho when residuals diverge

    void validate() const;
};

struct PrecisionSequence {
    std::vector<Matrix> matrices;  // n SPD p x p matrices (exactly sparse Z iterates)
    std::vector<std::vector<std::pair<int, int>>> support;  // per time, (j,k) with j<k
    double objective_value = 0.0;
    bool converged = false;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;

    int n_timepoints() const { return static_cast<int>(matrices.size()); }
    int n_nodes() const {
        return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows());
    }
};

/// Extracts the off-diagonal support of each matrix at kSupportEps.
std::vector<std::vector<std::pair<int, int>>> extract_support(const std::vector<Matrix>& thetas);

/// sum_i [-log det T_i + tr(S_i T_i)] + l1 sum_i |offdiag(T_i)|_1
/// + l2 sum_{i>=2} |T_i - T_{i-1}|_1. Throws on a non-PD matrix.
double objective_value(const std::vector<Matrix>& thetas, const CovarianceSequence& cov,
                       double lambda1, double lambda2, bool penalize_diagonal = false);

/// ADMM for the fused graphical lasso sequence objective. Per-time log-det
/// updates run in parallel, per-entry fused-lasso chains run in parallel;
/// results do not depend on the thread schedule.
PrecisionSequence solve_single(const CovarianceSequence& cov, const SolverConfig& config);

/// Minimal max-norm violation of the subgradient stationarity condition,
/// minimized over subgradient choices on zero and tied entries.
double kkt_residual(const PrecisionSequence& prec, const CovarianceSequence& cov, double lambda1,
                    double lambda2, bool penalize_diagonal = false);

struct TuneEntry {
    double lambda1, lambda2, aic;
    bool converged;
};

struct TuneReport {
    std::vector<TuneEntry> table;
    double best_lambda1 = 0.0, best_lambda2 = 0.0, best_aic = 0.0;
};

/// Grid search minimizing AIC = sum_i -2(log det T_i - tr(S_i T_i)) + 2 sum_i d_i
/// with d_i the upper-triangular off-diagonal support size. Ties break toward
/// larger lambda1, then larger lambda2. Non-converged grid points are skipped.
SolverConfig tune_hyperparams(const CovarianceSequence& cov, const std::vector<double>& grid1,
                              const std::vector<double>& grid2, const SolverConfig& config_template,
                              TuneReport* report = nullptr);

namespace serial {
/// Single-threaded reference for one ADMM theta-update pass: closed-form
/// log-det proximal via eigendecomposition of rho (Z_i - U_i) - S_i.
void theta_update(const CovarianceSequence& cov, const std::vector<Matrix>& z,
                  const std::vector<Matrix>& u, double rho, std::vector<Matrix>& theta);

/// Single-threaded reference for one ADMM z-update pass (per-entry chains).
void z_update(const std::vector<Matrix>& theta, const std::vector<Matrix>& u, double rho,
              double lambda1, double lambda2, bool penalize_diagonal, std::vector<Matrix>& z);
}  // namespace serial

namespace parallel {
/// OpenMP versions of the two update passes used by solve_single; bitwise
/// equal to the serial references for any schedule.
void theta_update(const CovarianceSequence& cov, const std::vector<Matrix>& z,
                  const std::vector<Matrix>& u, double rho, std::vector<Matrix>& theta);
void z_update(const std::vector<Matrix>& theta, const std::vector<Matrix>& u, double rho,
              double lambda1, double lambda2, bool penalize_diagonal, std::vector<Matrix>& z);
}  // namespace parallel

}  // namespace dyncon
