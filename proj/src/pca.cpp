#include "dyncon/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dyncon {

Vector PcaModel::explained_variance_shares() const {
    if (total_variance <= 0.0) return Vector::Zero(eigenvalues.size());
    return eigenvalues / total_variance;
}

namespace {

void fix_sign(Matrix& components) {
    for (int c = 0; c < components.rows(); ++c) {
        int arg = 0;
        double best = -1.0;
        for (int j = 0; j < components.cols(); ++j) {
            const double a = std::abs(components(c, j));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (components(c, arg) < 0.0) components.row(c) = -components.row(c);
    }
}

}  // namespace

PcaModel fit_pca(const StackedLaplacians& stacked, int k, bool center) {
    const long rows = stacked.matrix.rows();
    const long cols = stacked.matrix.cols();
    if (k < 1 || k > std::min(rows, cols))
        throw std::invalid_argument("fit_pca: k must be in [1, min(rows, cols)]");

    PcaModel model;
    model.k = k;
    model.edge_index = stacked.edge_index;
    model.node_labels = stacked.node_labels;
    model.column_means =
        center ? Vector(stacked.matrix.colwise().mean()) : Vector(Vector::Zero(cols));
    const Matrix centered = stacked.matrix.rowwise() - model.column_means.transpose();
    const double divisor = static_cast<double>(rows - 1);
    model.total_variance = centered.squaredNorm() / divisor;

    model.components.resize(k, cols);
    model.eigenvalues.resize(k);
    if (rows < cols) {
        // Gram trick: eigenvectors of the small row Gram map back through X^T.
        const Matrix gram = centered * centered.transpose() / divisor;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        for (int c = 0; c < k; ++c) {
            const long idx = rows - 1 - c;  // eigenvalues ascending in Eigen
            model.eigenvalues[c] = std::max(eig.eigenvalues()[idx], 0.0);
            Vector comp = centered.transpose() * eig.eigenvectors().col(idx);
            const double norm = comp.norm();
            if (norm <= 0.0)
                throw std::invalid_argument("fit_pca: requested component " + std::to_string(c) +
                                            " lies in the null space (rank deficient data)");
            model.components.row(c) = comp.transpose() / norm;
        }
    } else {
        const Matrix covm = centered.transpose() * centered / divisor;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(covm);
        for (int c = 0; c < k; ++c) {
            const long idx = cols - 1 - c;
            model.eigenvalues[c] = std::max(eig.eigenvalues()[idx], 0.0);
            model.components.row(c) = eig.eigenvectors().col(idx).transpose();
        }
    }
    fix_sign(model.components);
    return model;
}

Matrix project_pca(const PcaModel& model, const Matrix& session_rows) {
    if (session_rows.cols() != model.components.cols())
        throw std::invalid_argument("project_pca: column count mismatch");
    const Matrix centered = session_rows.rowwise() - model.column_means.transpose();
    return model.components * centered.transpose();  // k x n
}

Matrix mean_trajectory(const PcaModel& model, const StackedLaplacians& stacked,
                       const std::string& acquisition_filter) {
    // Split stacked rows into sessions on (subject, acquisition) boundaries.
    std::vector<std::pair<long, long>> blocks;  // [begin, end)
    const auto& meta = stacked.row_meta;
    for (long r = 0; r < static_cast<long>(meta.size()); ++r) {
        if (r == 0 || meta[r].subject_id != meta[r - 1].subject_id ||
            meta[r].acquisition != meta[r - 1].acquisition)
            blocks.emplace_back(r, r);
        blocks.back().second = r + 1;
    }

    Matrix sum;
    long count = 0, common_n = -1;
    for (const auto& [begin, end] : blocks) {
        if (!acquisition_filter.empty() && meta[begin].acquisition != acquisition_filter) continue;
        const long n = end - begin;
        if (common_n < 0) {
            common_n = n;
            sum = Matrix::Zero(model.k, n);
        } else if (n != common_n) {
            throw std::invalid_argument("mean_trajectory: sessions have unequal lengths");
        }
        sum += project_pca(model, stacked.matrix.middleRows(begin, n));
        ++count;
    }
    if (count == 0) throw std::invalid_argument("mean_trajectory: no sessions match the filter");
    return sum / static_cast<double>(count);
}

std::vector<EdgeWeight> top_edges(const Vector& weights, const EdgeIndex& edge_index,
                                  double retain_fraction) {
    if (!(retain_fraction > 0.0) || retain_fraction > 1.0)
        throw std::invalid_argument("retain_fraction must be in (0, 1]");
    const int n_edges = static_cast<int>(weights.size());
    const int keep = static_cast<int>(std::ceil(retain_fraction * n_edges));

    std::vector<int> order(n_edges);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(weights[a]) > std::abs(weights[b]);
    });

    std::vector<EdgeWeight> out;
    out.reserve(keep);
    for (int r = 0; r < keep; ++r) {
        const auto [j, k] = edge_index.pair(order[r]);
        out.push_back({j, k, weights[order[r]], r + 1});
    }
    return out;
}

std::vector<EdgeWeight> component_network(const PcaModel& model, int component,
                                          double retain_fraction) {
    if (component < 0 || component >= model.k)
        throw std::invalid_argument("component_network: component index out of range");
    return top_edges(model.components.row(component).transpose(), model.edge_index,
                     retain_fraction);
}

}  // namespace dyncon
