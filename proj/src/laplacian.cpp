#include "dyncon/laplacian.hpp"

#include <cmath>
#include <stdexcept>

namespace dyncon {

Matrix laplacian(const Matrix& theta, DegreeMode mode) {
    const int p = static_cast<int>(theta.rows());
    Vector degree(p);
    if (mode == DegreeMode::PrecisionDiagonal) {
        degree = theta.diagonal();
    } else {
        Eigen::LLT<Matrix> llt(theta);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("laplacian: matrix is not positive definite");
        degree = llt.solve(Matrix::Identity(p, p)).diagonal();
    }
    for (int j = 0; j < p; ++j)
        if (!(degree[j] > 0.0))
            throw std::invalid_argument("laplacian: nonpositive degree entry at node " +
                                        std::to_string(j));
    const Vector inv_sqrt = degree.array().rsqrt();
    Matrix d_minus_theta = -theta;
    d_minus_theta.diagonal() += degree;
    return inv_sqrt.asDiagonal() * d_minus_theta * inv_sqrt.asDiagonal();
}

LaplacianSequence laplacian_sequence(const PrecisionSequence& prec, DegreeMode mode) {
    LaplacianSequence out;
    out.matrices.resize(prec.matrices.size());
    const int n = static_cast<int>(prec.matrices.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out.matrices[i] = laplacian(prec.matrices[i], mode);
    return out;
}

int EdgeIndex::col(int j, int k) const {
    // lexicographic (j,k), j < k
    return j * p - j * (j + 1) / 2 + (k - j - 1);
}

std::pair<int, int> EdgeIndex::pair(int col) const {
    int j = 0;
    while (col >= p - j - 1) {
        col -= p - j - 1;
        ++j;
    }
    return {j, j + 1 + col};
}

std::string EdgeIndex::edge_name(int col, const std::vector<std::string>& node_labels) const {
    const auto [j, k] = pair(col);
    return node_labels[j] + "--" + node_labels[k];
}

Vector vectorize_upper(const Matrix& l) {
    const int p = static_cast<int>(l.rows());
    Vector v(p * (p - 1) / 2);
    int c = 0;
    for (int j = 0; j < p; ++j)
        for (int k = j + 1; k < p; ++k) v[c++] = l(j, k);
    return v;
}

Matrix devectorize(const Vector& v, int p) {
    if (v.size() != p * (p - 1) / 2)
        throw std::invalid_argument("devectorize: length does not match node count");
    Matrix l = Matrix::Zero(p, p);
    int c = 0;
    for (int j = 0; j < p; ++j)
        for (int k = j + 1; k < p; ++k) {
            l(j, k) = v[c];
            l(k, j) = v[c];
            ++c;
        }
    return l;
}

StackedLaplacians stack_population(const Population& population,
                                   const std::vector<LaplacianSequence>& sequences) {
    if (population.sessions.size() != sequences.size())
        throw std::invalid_argument("stack_population: session/sequence count mismatch");
    if (population.sessions.empty())
        throw std::invalid_argument("stack_population: empty population");

    const int p = population.sessions.front().n_nodes();
    long total_rows = 0;
    for (std::size_t s = 0; s < sequences.size(); ++s) {
        if (!sequences[s].matrices.empty() &&
            sequences[s].matrices.front().rows() != p)
            throw std::invalid_argument("stack_population: node count mismatch in session " +
                                        std::to_string(s));
        total_rows += static_cast<long>(sequences[s].matrices.size());
    }

    StackedLaplacians out;
    out.edge_index = EdgeIndex(p);
    out.node_labels = population.sessions.front().node_labels;
    out.matrix.resize(total_rows, out.edge_index.n_edges());
    out.row_meta.reserve(total_rows);
    long row = 0;
    for (std::size_t s = 0; s < sequences.size(); ++s) {
        const auto& session = population.sessions[s];
        for (std::size_t i = 0; i < sequences[s].matrices.size(); ++i) {
            out.matrix.row(row) = vectorize_upper(sequences[s].matrices[i]).transpose();
            out.row_meta.push_back({session.subject_id, session.acquisition, static_cast<int>(i),
                                    session.task_labels[i]});
            ++row;
        }
    }
    return out;
}

}  // namespace dyncon
