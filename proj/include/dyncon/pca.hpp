#pragma once

#include <vector>

#include "dyncon/laplacian.hpp"
#include "dyncon/types.hpp"

namespace dyncon {

struct PcaModel {
    Matrix components;    // k x C(p,2), orthonormal rows
    Vector eigenvalues;   // k, nonincreasing (covariance divisor rows-1)
    Vector column_means;  // zero vector when fitted uncentered
    double total_variance = 0.0;
    int k = 0;
    EdgeIndex edge_index;
    std::vector<std::string> node_labels;

    Vector explained_variance_shares() const;
};

/// Top-k eigenvectors of the (centered by default) column covariance of the
/// stacked matrix, computed through the smaller Gram form. Component signs
/// are fixed so each row's largest-magnitude entry is positive.
PcaModel fit_pca(const StackedLaplacians& stacked, int k, bool center = true);

/// k x n trajectory: scores of each (centered) row on each component.
Matrix project_pca(const PcaModel& model, const Matrix& session_rows);

/// Pointwise mean of per-session trajectories over sessions matching the
/// acquisition filter (empty string = all). Sessions must share n.
Matrix mean_trajectory(const PcaModel& model, const StackedLaplacians& stacked,
                       const std::string& acquisition_filter);

struct EdgeWeight {
    int j = 0, k = 0;  // node pair
    double weight = 0.0;
    int rank = 0;  // 1-based, by |weight| descending
};

/// The ceil(retain_fraction * C(p,2)) edges with largest |loading| of one
/// component, |weight| descending, ties by edge index.
std::vector<EdgeWeight> component_network(const PcaModel& model, int component,
                                          double retain_fraction);

/// Same ranking applied to an arbitrary edge-weight vector.
std::vector<EdgeWeight> top_edges(const Vector& weights, const EdgeIndex& edge_index,
                                  double retain_fraction);

}  // namespace dyncon
