#include "dyncon/single_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "dyncon/fused_lasso.hpp"

namespace dyncon {

void SolverConfig::validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0)
        throw std::invalid_argument("lambda1/lambda2 must be nonnegative");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0))
        throw std::invalid_argument("stopping tolerances must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

std::vector<std::vector<std::pair<int, int>>> extract_support(const std::vector<Matrix>& thetas) {
    std::vector<std::vector<std::pair<int, int>>> support(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const int p = static_cast<int>(thetas[i].rows());
        for (int j = 0; j < p; ++j)
            for (int k = j + 1; k < p; ++k)
                if (std::abs(thetas[i](j, k)) > kSupportEps) support[i].emplace_back(j, k);
    }
    return support;
}

namespace {

double offdiag_l1(const Matrix& m) {
    double s = 0.0;
    for (int j = 0; j < m.rows(); ++j)
        for (int k = 0; k < m.cols(); ++k)
            if (j != k) s += std::abs(m(j, k));
    return s;
}

double penalty_value(const std::vector<Matrix>& thetas, double lambda1, double lambda2,
                     bool penalize_diagonal) {
    double pen = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        pen += lambda1 * (penalize_diagonal ? thetas[i].cwiseAbs().sum() : offdiag_l1(thetas[i]));
        if (i > 0) pen += lambda2 * (thetas[i] - thetas[i - 1]).cwiseAbs().sum();
    }
    return pen;
}

// Closed-form minimizer of -log det T + tr(S T) + (rho/2) |T - M|_F^2.
Matrix logdet_prox(const Matrix& sigma, const Matrix& m, double rho) {
    const Matrix a = rho * m - sigma;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
    const Vector d = eig.eigenvalues();
    Vector mapped(d.size());
    for (int j = 0; j < d.size(); ++j)
        mapped[j] = (d[j] + std::sqrt(d[j] * d[j] + 4.0 * rho)) / (2.0 * rho);
    return eig.eigenvectors() * mapped.asDiagonal() * eig.eigenvectors().transpose();
}

double frob_norm_sq(const std::vector<Matrix>& a) {
    double s = 0.0;
    for (const auto& m : a) s += m.squaredNorm();
    return s;
}

double frob_diff_sq(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
    return s;
}

}  // namespace

double objective_value(const std::vector<Matrix>& thetas, const CovarianceSequence& cov,
                       double lambda1, double lambda2, bool penalize_diagonal) {
    if (thetas.size() != cov.matrices.size())
        throw std::invalid_argument("objective_value: sequence length mismatch");
    double value = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        Eigen::LLT<Matrix> llt(thetas[i]);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("objective_value: matrix at time " + std::to_string(i) +
                                        " is not positive definite");
        double logdet = 0.0;
        for (int j = 0; j < thetas[i].rows(); ++j) logdet += std::log(llt.matrixL()(j, j));
        value += -2.0 * logdet + (cov.matrices[i].cwiseProduct(thetas[i])).sum();
    }
    return value + penalty_value(thetas, lambda1, lambda2, penalize_diagonal);
}

namespace serial {

void theta_update(const CovarianceSequence& cov, const std::vector<Matrix>& z,
                  const std::vector<Matrix>& u, double rho, std::vector<Matrix>& theta) {
    for (std::size_t i = 0; i < z.size(); ++i)
        theta[i] = logdet_prox(cov.matrices[i], z[i] - u[i], rho);
}

void z_update(const std::vector<Matrix>& theta, const std::vector<Matrix>& u, double rho,
              double lambda1, double lambda2, bool penalize_diagonal, std::vector<Matrix>& z) {
    const int n = static_cast<int>(theta.size());
    const int p = static_cast<int>(theta.front().rows());
    Vector y(n);
    for (int j = 0; j < p; ++j) {
        for (int k = j; k < p; ++k) {
            for (int i = 0; i < n; ++i) y[i] = theta[i](j, k) + u[i](j, k);
            const double l1 = (j == k && !penalize_diagonal) ? 0.0 : lambda1;
            const Vector chain = fused_lasso_chain(y, rho, l1, lambda2);
            for (int i = 0; i < n; ++i) {
                z[i](j, k) = chain[i];
                z[i](k, j) = chain[i];
            }
        }
    }
}

}  // namespace serial

namespace parallel {

void theta_update(const CovarianceSequence& cov, const std::vector<Matrix>& z,
                  const std::vector<Matrix>& u, double rho, std::vector<Matrix>& theta) {
    const int n = static_cast<int>(z.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) theta[i] = logdet_prox(cov.matrices[i], z[i] - u[i], rho);
}

void z_update(const std::vector<Matrix>& theta, const std::vector<Matrix>& u, double rho,
              double lambda1, double lambda2, bool penalize_diagonal,
              std::vector<Matrix>& z) {
    const int n = static_cast<int>(theta.size());
    const int p = static_cast<int>(theta.front().rows());
    const int n_pairs = p * (p + 1) / 2;
#pragma omp parallel for schedule(static)
    for (int pair = 0; pair < n_pairs; ++pair) {
        // unflatten upper-triangular-with-diagonal index
        int j = 0, rem = pair;
        while (rem >= p - j) {
            rem -= p - j;
            ++j;
        }
        const int k = j + rem;
        Vector y(n);
        for (int i = 0; i < n; ++i) y[i] = theta[i](j, k) + u[i](j, k);
        const double l1 = (j == k && !penalize_diagonal) ? 0.0 : lambda1;
        const Vector chain = fused_lasso_chain(y, rho, l1, lambda2);
        for (int i = 0; i < n; ++i) {
            z[i](j, k) = chain[i];
            z[i](k, j) = chain[i];
        }
    }
}

}  // namespace parallel

namespace {

// log det with eigenvalues clamped away from zero; only used to report an
// objective on non-converged iterates that may sit on the PSD boundary.
double objective_clamped(const std::vector<Matrix>& thetas, const CovarianceSequence& cov,
                         double lambda1, double lambda2, bool penalize_diagonal) {
    double value = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(thetas[i]);
        double logdet = 0.0;
        for (int j = 0; j < eig.eigenvalues().size(); ++j)
            logdet += std::log(std::max(eig.eigenvalues()[j], 1e-12));
        value += -logdet + (cov.matrices[i].cwiseProduct(thetas[i])).sum();
    }
    return value + penalty_value(thetas, lambda1, lambda2, penalize_diagonal);
}

}  // namespace

PrecisionSequence solve_single(const CovarianceSequence& cov, const SolverConfig& config) {
    config.validate();
    const int n = cov.n_timepoints();
    const int p = cov.n_nodes();
    if (n == 0) throw std::invalid_argument("solve_single: empty covariance sequence");

    double rho = config.rho;
    std::vector<Matrix> theta(n, Matrix::Identity(p, p));
    std::vector<Matrix> z(n, Matrix::Identity(p, p));
    std::vector<Matrix> u(n, Matrix::Zero(p, p));
    std::vector<Matrix> z_prev(n);

    const double sqrt_dim = std::sqrt(static_cast<double>(n) * p * p);
    PrecisionSequence out;
    out.lambda1 = config.lambda1;
    out.lambda2 = config.lambda2;

    int iter = 0;
    for (; iter < config.max_iter; ++iter) {
        parallel::theta_update(cov, z, u, rho, theta);
        z_prev = z;
        parallel::z_update(theta, u, rho, config.lambda1, config.lambda2,
                           config.penalize_diagonal, z);
        for (int i = 0; i < n; ++i) u[i] += theta[i] - z[i];

        const double r = std::sqrt(frob_diff_sq(theta, z));
        const double s = rho * std::sqrt(frob_diff_sq(z, z_prev));
        const double eps_pri =
            sqrt_dim * config.eps_abs +
            config.eps_rel * std::max(std::sqrt(frob_norm_sq(theta)), std::sqrt(frob_norm_sq(z)));
        const double eps_dual =
            sqrt_dim * config.eps_abs + config.eps_rel * rho * std::sqrt(frob_norm_sq(u));
        out.primal_residual = r;
        out.dual_residual = s;
        if (r <= eps_pri && s <= eps_dual) {
            out.converged = true;
            ++iter;
            break;
        }
        if (config.adaptive_rho) {
            if (r > 10.0 * s) {
                rho *= 2.0;
                for (auto& m : u) m *= 0.5;
            } else if (s > 10.0 * r) {
                rho *= 0.5;
                for (auto& m : u) m *= 2.0;
            }
        }
    }
    out.iterations = iter;
    out.matrices = std::move(z);
    out.support = extract_support(out.matrices);
    out.objective_value = objective_clamped(out.matrices, cov, config.lambda1, config.lambda2,
                                            config.penalize_diagonal);
    return out;
}

namespace {

struct Interval {
    double lo, hi;
    bool empty() const { return lo > hi; }
};

// Minimal max-norm stationarity violation along one entry chain, found by
// bisection over the threshold with interval propagation of the fusion
// subgradients.
double chain_min_violation(const Vector& theta, const Vector& grad, double lambda1, double lambda2,
                           bool l1_active) {
    const int n = static_cast<int>(theta.size());
    // Ranges of lambda1 * s_i.
    std::vector<Interval> s_range(n);
    for (int i = 0; i < n; ++i) {
        if (!l1_active || lambda1 == 0.0)
            s_range[i] = {0.0, 0.0};
        else if (theta[i] > kSupportEps)
            s_range[i] = {lambda1, lambda1};
        else if (theta[i] < -kSupportEps)
            s_range[i] = {-lambda1, -lambda1};
        else
            s_range[i] = {-lambda1, lambda1};
    }
    // Allowed ranges of lambda2 * v_i for i = 2..n (index i-1 pairs i with i-1).
    std::vector<Interval> v_range(n + 1, {0.0, 0.0});
    for (int i = 1; i < n; ++i) {
        const double diff = theta[i] - theta[i - 1];
        if (diff > kSupportEps)
            v_range[i] = {lambda2, lambda2};
        else if (diff < -kSupportEps)
            v_range[i] = {-lambda2, -lambda2};
        else
            v_range[i] = {-lambda2, lambda2};
    }
    // v_range[0] and v_range[n] stay {0,0}: no fusion term outside the chain.

    auto feasible = [&](double t) {
        Interval v = v_range[0];
        for (int i = 0; i < n; ++i) {
            // residual_i = grad_i + s_i + v_i - v_{i+1} must lie in [-t, t]
            Interval next{grad[i] + s_range[i].lo + v.lo - t, grad[i] + s_range[i].hi + v.hi + t};
            next.lo = std::max(next.lo, v_range[i + 1].lo);
            next.hi = std::min(next.hi, v_range[i + 1].hi);
            if (next.empty()) return false;
            v = next;
        }
        return true;
    };

    double hi = 0.0;
    for (int i = 0; i < n; ++i)
        hi = std::max(hi, std::abs(grad[i]) + lambda1 + 2.0 * lambda2);
    if (feasible(0.0)) return 0.0;
    double lo = 0.0;
    for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

double kkt_residual(const PrecisionSequence& prec, const CovarianceSequence& cov, double lambda1,
                    double lambda2, bool penalize_diagonal) {
    const int n = prec.n_timepoints();
    const int p = prec.n_nodes();
    if (n != cov.n_timepoints()) throw std::invalid_argument("kkt_residual: length mismatch");

    std::vector<Matrix> grad(n);
    for (int i = 0; i < n; ++i) {
        Eigen::LLT<Matrix> llt(prec.matrices[i]);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("kkt_residual: matrix at time " + std::to_string(i) +
                                        " is not positive definite");
        grad[i] = -llt.solve(Matrix::Identity(p, p)) + cov.matrices[i];
    }

    double worst = 0.0;
    Vector theta_chain(n), grad_chain(n);
    for (int j = 0; j < p; ++j) {
        for (int k = j; k < p; ++k) {
            for (int i = 0; i < n; ++i) {
                theta_chain[i] = prec.matrices[i](j, k);
                grad_chain[i] = grad[i](j, k);
            }
            const bool l1_active = (j != k) || penalize_diagonal;
            worst = std::max(worst, chain_min_violation(theta_chain, grad_chain, lambda1, lambda2,
                                                        l1_active));
        }
    }
    return worst;
}

SolverConfig tune_hyperparams(const CovarianceSequence& cov, const std::vector<double>& grid1,
                              const std::vector<double>& grid2, const SolverConfig& config_template,
                              TuneReport* report) {
    if (grid1.empty() || grid2.empty())
        throw std::invalid_argument("tune_hyperparams: empty grid");
    std::vector<double> g1 = grid1, g2 = grid2;
    std::sort(g1.begin(), g1.end());
    std::sort(g2.begin(), g2.end());

    bool found = false;
    double best_aic = 0.0;
    SolverConfig best = config_template;
    TuneReport local;
    for (double l1 : g1) {
        for (double l2 : g2) {
            SolverConfig cfg = config_template;
            cfg.lambda1 = l1;
            cfg.lambda2 = l2;
            PrecisionSequence fit = solve_single(cov, cfg);
            if (!fit.converged) {
                std::fprintf(stderr,
                             "warning: skipping non-converged grid point lambda1=%g lambda2=%g\n",
                             l1, l2);
                local.table.push_back({l1, l2, std::nan(""), false});
                continue;
            }
            double aic = 0.0;
            bool pd = true;
            for (int i = 0; i < fit.n_timepoints(); ++i) {
                Eigen::LLT<Matrix> llt(fit.matrices[i]);
                if (llt.info() != Eigen::Success) {
                    pd = false;
                    break;
                }
                double logdet = 0.0;
                for (int j = 0; j < fit.matrices[i].rows(); ++j)
                    logdet += std::log(llt.matrixL()(j, j));
                logdet *= 2.0;
                const double trace = (cov.matrices[i].cwiseProduct(fit.matrices[i])).sum();
                aic += -2.0 * (logdet - trace) + 2.0 * static_cast<double>(fit.support[i].size());
            }
            if (!pd) {
                std::fprintf(stderr,
                             "warning: skipping non-PD grid point lambda1=%g lambda2=%g\n", l1,
                             l2);
                local.table.push_back({l1, l2, std::nan(""), false});
                continue;
            }
            local.table.push_back({l1, l2, aic, true});
            // <= keeps the later (larger) grid point on exact ties
            if (!found || aic <= best_aic) {
                found = true;
                best_aic = aic;
                best = cfg;
            }
        }
    }
    if (!found) throw std::runtime_error("tune_hyperparams: all grid points failed");
    local.best_lambda1 = best.lambda1;
    local.best_lambda2 = best.lambda2;
    local.best_aic = best_aic;
    if (report) *report = local;
    return best;
}

}  // namespace dyncon
