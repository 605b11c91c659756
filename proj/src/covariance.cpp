#include "dyncon/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dyncon {

Vector gaussian_kernel_weights(int n, int center, double bandwidth) {
    Vector w(n);
    for (int j = 0; j < n; ++j) {
        const double d = static_cast<double>(j - center);
        w[j] = std::exp(-d * d / (2.0 * bandwidth * bandwidth));
    }
    return w / w.sum();
}

namespace {

Matrix weighted_covariance_at(const Matrix& data, const Vector& w) {
    const Eigen::RowVectorXd mu = w.transpose() * data;
    const Matrix centered = data.rowwise() - mu;
    return centered.transpose() * w.asDiagonal() * centered;
}

}  // namespace

CovarianceSequence kernel_weighted_covariances(const SubjectSession& session, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    const int n = session.n_timepoints();
    CovarianceSequence out;
    out.bandwidth = bandwidth;
    out.matrices.resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const Vector w = gaussian_kernel_weights(n, i, bandwidth);
        out.matrices[i] = weighted_covariance_at(session.data, w);
    }
    return out;
}

namespace serial {

CovarianceSequence kernel_weighted_covariances(const SubjectSession& session, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    const int n = session.n_timepoints();
    const int p = session.n_nodes();
    CovarianceSequence out;
    out.bandwidth = bandwidth;
    out.matrices.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vector w = gaussian_kernel_weights(n, i, bandwidth);
        Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(p);
        for (int j = 0; j < n; ++j) mu += w[j] * session.data.row(j);
        Matrix sigma = Matrix::Zero(p, p);
        for (int j = 0; j < n; ++j) {
            const Eigen::RowVectorXd c = session.data.row(j) - mu;
            sigma += w[j] * (c.transpose() * c);
        }
        out.matrices[i] = sigma;
    }
    return out;
}

}  // namespace serial

double select_bandwidth(const SubjectSession& session, const std::vector<double>& candidate_grid) {
    if (candidate_grid.empty()) throw std::invalid_argument("bandwidth grid is empty");
    for (double h : candidate_grid)
        if (!(h > 0.0)) throw std::invalid_argument("bandwidth grid values must be positive");

    const int n = session.n_timepoints();
    const int p = session.n_nodes();
    constexpr double kRidge = 1e-6;  // evaluation-only regularization

    std::vector<double> grid = candidate_grid;
    std::sort(grid.begin(), grid.end());

    double best_h = grid.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (double h : grid) {
        Vector per_point(n);  // summed serially so the score is schedule-independent
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            Vector w = gaussian_kernel_weights(n, i, h);
            w[i] = 0.0;
            w /= w.sum();
            const Eigen::RowVectorXd mu = w.transpose() * session.data;
            const Matrix centered = session.data.rowwise() - mu;
            Matrix sigma = centered.transpose() * w.asDiagonal() * centered;
            sigma.diagonal().array() += kRidge;
            Eigen::LLT<Matrix> llt(sigma);
            const Vector resid = (session.data.row(i) - mu).transpose();
            const Vector solved = llt.solve(resid);
            double logdet = 0.0;
            for (int j = 0; j < p; ++j) logdet += std::log(llt.matrixL()(j, j));
            logdet *= 2.0;
            per_point[i] = -0.5 * (p * std::log(2.0 * M_PI) + logdet + resid.dot(solved));
        }
        const double score = per_point.sum();
        if (score >= best_score) {  // ties toward the larger bandwidth
            best_score = score;
            best_h = h;
        }
    }
    return best_h;
}

}  // namespace dyncon
