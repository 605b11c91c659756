#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dyncon/single_solver.hpp"
#include "dyncon/types.hpp"

namespace dyncon {

/// How the degree matrix D in L = D^{-1/2} (D - Theta) D^{-1/2} is read.
/// PrecisionDiagonal (default) uses diag(Theta), giving zero-diagonal L
/// whose off-diagonal entries are partial correlations up to sign.
/// MarginalVariance uses diag(Theta^{-1}) for sensitivity analysis.
enum class DegreeMode { PrecisionDiagonal, MarginalVariance };

/// Normalized Laplacian of one precision matrix. Throws on a nonpositive
/// degree entry.
Matrix laplacian(const Matrix& theta, DegreeMode mode = DegreeMode::PrecisionDiagonal);

struct LaplacianSequence {
    std::vector<Matrix> matrices;
};

LaplacianSequence laplacian_sequence(const PrecisionSequence& prec,
                                     DegreeMode mode = DegreeMode::PrecisionDiagonal);

/// Bijection between columns and node pairs (j,k), j < k, lexicographic.
struct EdgeIndex {
    int p = 0;

    explicit EdgeIndex(int nodes = 0) : p(nodes) {}
    int n_edges() const { return p * (p - 1) / 2; }
    int col(int j, int k) const;             // j < k
    std::pair<int, int> pair(int col) const;  // inverse
    std::string edge_name(int col, const std::vector<std::string>& node_labels) const;
};

/// Upper-triangular entries of a symmetric matrix in EdgeIndex order.
Vector vectorize_upper(const Matrix& l);

/// Symmetric matrix with zero diagonal from its vectorized upper triangle.
Matrix devectorize(const Vector& v, int p);

struct RowMeta {
    std::string subject_id;
    std::string acquisition;
    int time = 0;  // 0-based within the session
    std::string task;
};

/// All sessions' vectorized Laplacians stacked row-wise, session order
/// preserved, time ascending within a session.
struct StackedLaplacians {
    Matrix matrix;  // (sum of n) x C(p,2)
    std::vector<RowMeta> row_meta;
    EdgeIndex edge_index;
    std::vector<std::string> node_labels;
};

/// `sequences[i]` must belong to `population.sessions[i]`.
StackedLaplacians stack_population(const Population& population,
                                   const std::vector<LaplacianSequence>& sequences);

}  // namespace dyncon
