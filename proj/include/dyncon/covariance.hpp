#pragma once

#include <vector>

#include "dyncon/types.hpp"

namespace dyncon {

/// Per-time-point covariance estimates feeding the solver.
struct CovarianceSequence {
    std::vector<Matrix> matrices;  // n symmetric PSD p x p matrices
    double bandwidth = 0.0;        // kernel bandwidth in time-point units

    int n_timepoints() const { return static_cast<int>(matrices.size()); }
    int n_nodes() const {
        return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows());
    }
};

/// Gaussian kernel weights w_ij ~ exp(-(i-j)^2 / (2 h^2)) normalized to sum 1
/// over j for each i.
Vector gaussian_kernel_weights(int n, int center, double bandwidth);

/// Kernel-weighted covariance at every time point:
///   Sigma_i = sum_j w_ij (X_j - mu_i)^T (X_j - mu_i),   mu_i = sum_j w_ij X_j.
/// Time points are computed in parallel; the result is schedule-independent.
CovarianceSequence kernel_weighted_covariances(const SubjectSession& session, double bandwidth);

/// Picks the grid bandwidth maximizing the summed leave-one-out Gaussian
/// log-density of X_i under (mu_i, Sigma_i + eps I) with weights excluding
/// j = i. Ties go to the larger bandwidth.
double select_bandwidth(const SubjectSession& session, const std::vector<double>& candidate_grid);

namespace serial {
/// Single-threaded double-loop reference of kernel_weighted_covariances.
CovarianceSequence kernel_weighted_covariances(const SubjectSession& session, double bandwidth);
}  // namespace serial

}  // namespace dyncon
