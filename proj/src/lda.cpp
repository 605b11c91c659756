#include "dyncon/lda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dyncon {

namespace {

constexpr double kRidge = 1e-4;      // stabilizes the scoring regression
constexpr double kCdTol = 1e-6;      // max coordinate change per sweep
constexpr int kCdMaxSweeps = 1000;

double soft(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

struct Standardizer {
    Vector means, sds;

    void fit(const Matrix& x) {
        const long m = x.rows();
        means = x.colwise().mean();
        sds.resize(x.cols());
        for (long j = 0; j < x.cols(); ++j) {
            const double var = (x.col(j).array() - means[j]).square().sum() / m;
            sds[j] = var > 0.0 ? std::sqrt(var) : 1.0;  // constant columns pass through as zeros
        }
    }
    Matrix apply(const Matrix& x) const {
        return (x.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
    }
};

Vector centered_scores(const std::vector<int>& labels) {
    Vector y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i];
    y.array() -= y.mean();
    return y;
}

// Lasso + ridge regression by cyclic coordinate descent on standardized
// columns (so each column has unit second moment).
Vector lasso_cd(const Matrix& x, const Vector& y, double lambda, Vector beta) {
    const long m = x.rows();
    const long e = x.cols();
    Vector resid = y - x * beta;
    for (int sweep = 0; sweep < kCdMaxSweeps; ++sweep) {
        double max_change = 0.0;
        for (long j = 0; j < e; ++j) {
            const double old = beta[j];
            const double rho = x.col(j).dot(resid) / m + old;
            const double updated = soft(rho, lambda) / (1.0 + kRidge);
            if (updated != old) {
                resid += x.col(j) * (old - updated);
                beta[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (max_change < kCdTol) break;
    }
    return beta;
}

void check_both_classes(const std::vector<int>& labels) {
    bool pos = false, neg = false;
    for (int l : labels) (l > 0 ? pos : neg) = true;
    if (!pos || !neg)
        throw std::invalid_argument("both contrast classes must be present in the rows");
}

// Sign classifier induced by a scoring-regression fit: threshold at the
// midpoint of the projected class means of the training rows.
double midpoint_threshold(const Matrix& x, const std::vector<int>& labels, const Vector& beta) {
    double sum_pos = 0.0, sum_neg = 0.0;
    int n_pos = 0, n_neg = 0;
    const Vector scores = x * beta;
    for (long i = 0; i < x.rows(); ++i) {
        if (labels[i] > 0) {
            sum_pos += scores[i];
            ++n_pos;
        } else {
            sum_neg += scores[i];
            ++n_neg;
        }
    }
    return 0.5 * (sum_pos / n_pos + sum_neg / n_neg);
}

}  // namespace

std::vector<double> make_lambda_grid(const Matrix& rows, const std::vector<int>& labels,
                                     int n_values, double min_ratio) {
    check_both_classes(labels);
    Standardizer st;
    st.fit(rows);
    const Matrix x = st.apply(rows);
    const Vector y = centered_scores(labels);
    const double lambda_max = (x.transpose() * y).cwiseAbs().maxCoeff() / rows.rows();
    std::vector<double> grid(n_values);
    for (int i = 0; i < n_values; ++i)
        grid[i] = lambda_max * std::pow(min_ratio, static_cast<double>(i) / (n_values - 1));
    std::reverse(grid.begin(), grid.end());  // ascending
    return grid;
}

std::vector<int> sparse_lda_subject(const Matrix& rows, const std::vector<int>& labels,
                                    const std::vector<double>& lambda_grid, int cv_folds) {
    if (lambda_grid.empty()) throw std::invalid_argument("sparse_lda_subject: empty lambda grid");
    if (cv_folds < 2) throw std::invalid_argument("sparse_lda_subject: cv_folds must be >= 2");
    if (static_cast<long>(labels.size()) != rows.rows())
        throw std::invalid_argument("sparse_lda_subject: label/row count mismatch");
    check_both_classes(labels);

    const long m = rows.rows();
    // Deterministic stratified fold assignment: round-robin within each class.
    std::vector<int> fold(m);
    int pos_seen = 0, neg_seen = 0;
    for (long i = 0; i < m; ++i)
        fold[i] = (labels[i] > 0 ? pos_seen++ : neg_seen++) % cv_folds;

    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());

    double best_acc = -1.0;
    double best_lambda = grid.front();
    for (double lambda : grid) {
        long correct = 0, total = 0;
        for (int f = 0; f < cv_folds; ++f) {
            std::vector<long> train_idx, val_idx;
            for (long i = 0; i < m; ++i) (fold[i] == f ? val_idx : train_idx).push_back(i);
            Matrix x_train(train_idx.size(), rows.cols());
            std::vector<int> l_train(train_idx.size());
            for (std::size_t i = 0; i < train_idx.size(); ++i) {
                x_train.row(i) = rows.row(train_idx[i]);
                l_train[i] = labels[train_idx[i]];
            }
            bool pos = false, neg = false;
            for (int l : l_train) (l > 0 ? pos : neg) = true;
            if (!pos || !neg) continue;  // degenerate fold

            Standardizer st;
            st.fit(x_train);
            const Matrix xs = st.apply(x_train);
            const Vector beta =
                lasso_cd(xs, centered_scores(l_train), lambda, Vector::Zero(rows.cols()));

            int majority = 0;
            {
                long n_pos = std::count_if(l_train.begin(), l_train.end(),
                                           [](int l) { return l > 0; });
                majority = (2 * n_pos >= static_cast<long>(l_train.size())) ? 1 : -1;
            }
            if (beta.isZero(0.0)) {
                for (long i : val_idx) {
                    correct += (labels[i] == majority);
                    ++total;
                }
                continue;
            }
            const double thr = midpoint_threshold(xs, l_train, beta);
            for (long i : val_idx) {
                const Vector xrow =
                    ((rows.row(i).transpose() - st.means).array() / st.sds.array()).matrix();
                const int pred = (xrow.dot(beta) > thr) ? 1 : -1;
                correct += (pred == labels[i]);
                ++total;
            }
        }
        const double acc = total > 0 ? static_cast<double>(correct) / total : 0.0;
        if (acc >= best_acc) {  // ties toward the larger lambda
            best_acc = acc;
            best_lambda = lambda;
        }
    }

    Standardizer st;
    st.fit(rows);
    const Vector beta =
        lasso_cd(st.apply(rows), centered_scores(labels), best_lambda, Vector::Zero(rows.cols()));
    std::vector<int> selected;
    for (long j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) selected.push_back(static_cast<int>(j));
    if (selected.empty())
        std::fprintf(stderr, "warning: sparse_lda_subject selected no edges at lambda=%g\n",
                     best_lambda);
    return selected;
}

ScreenResult stability_screen(const std::vector<std::vector<int>>& per_subject_sets, int n_edges,
                              double tau) {
    if (per_subject_sets.empty()) throw std::invalid_argument("stability_screen: no subjects");
    if (!(tau > 0.0) || tau > 1.0)
        throw std::invalid_argument("stability_screen: tau must be in (0, 1]");
    ScreenResult out;
    out.tau = tau;
    out.selection_frequency = Vector::Zero(n_edges);
    for (const auto& set : per_subject_sets)
        for (int e : set) out.selection_frequency[e] += 1.0;
    out.selection_frequency /= static_cast<double>(per_subject_sets.size());
    for (int e = 0; e < n_edges; ++e)
        if (out.selection_frequency[e] >= tau) out.selected_edges.push_back(e);
    out.p_prime = static_cast<int>(out.selected_edges.size());
    return out;
}

LdaModel fit_lda(const Matrix& rows, const std::vector<int>& labels,
                 const std::vector<int>& selected_edges, const ContrastSpec& contrast,
                 double shrinkage) {
    if (selected_edges.empty()) throw std::invalid_argument("fit_lda: no selected edges");
    if (static_cast<long>(labels.size()) != rows.rows())
        throw std::invalid_argument("fit_lda: label/row count mismatch");
    if (shrinkage < 0.0 || shrinkage > 1.0)
        throw std::invalid_argument("fit_lda: shrinkage must be in [0, 1]");
    check_both_classes(labels);

    const int e = static_cast<int>(selected_edges.size());
    Matrix x(rows.rows(), e);
    for (int j = 0; j < e; ++j) x.col(j) = rows.col(selected_edges[j]);

    Standardizer st;
    st.fit(x);
    const Matrix xs = st.apply(x);

    Vector mu_pos = Vector::Zero(e), mu_neg = Vector::Zero(e);
    long n_pos = 0, n_neg = 0;
    for (long i = 0; i < xs.rows(); ++i) {
        if (labels[i] > 0) {
            mu_pos += xs.row(i).transpose();
            ++n_pos;
        } else {
            mu_neg += xs.row(i).transpose();
            ++n_neg;
        }
    }
    mu_pos /= static_cast<double>(n_pos);
    mu_neg /= static_cast<double>(n_neg);

    Matrix sw = Matrix::Zero(e, e);
    for (long i = 0; i < xs.rows(); ++i) {
        const Vector c = xs.row(i).transpose() - (labels[i] > 0 ? mu_pos : mu_neg);
        sw += c * c.transpose();
    }
    sw /= static_cast<double>(xs.rows() - 2);

    Matrix reg = (1.0 - shrinkage) * sw;
    reg.diagonal() += shrinkage * sw.diagonal();

    Eigen::LLT<Matrix> llt(reg);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument(
            "fit_lda: within-class covariance is singular; use shrinkage > 0");
    Vector w = llt.solve(mu_pos - mu_neg);
    if (!w.allFinite())
        throw std::invalid_argument(
            "fit_lda: within-class covariance is singular; use shrinkage > 0");
    const double norm = w.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("fit_lda: zero discriminant direction");
    w /= norm;

    LdaModel model;
    model.weights = w;
    model.intercept = 0.5 * (w.dot(mu_pos) + w.dot(mu_neg));
    model.selected_edges = selected_edges;
    model.shrinkage = shrinkage;
    model.feature_means = st.means;
    model.feature_sds = st.sds;
    model.contrast = contrast;
    return model;
}

Vector project_lda(const LdaModel& model, const Matrix& session_rows) {
    const int e = static_cast<int>(model.selected_edges.size());
    for (int edge : model.selected_edges)
        if (edge >= session_rows.cols())
            throw std::invalid_argument("project_lda: session rows are missing edge columns");
    Vector traj(session_rows.rows());
    for (long i = 0; i < session_rows.rows(); ++i) {
        double score = 0.0;
        for (int j = 0; j < e; ++j)
            score += model.weights[j] * (session_rows(i, model.selected_edges[j]) -
                                         model.feature_means[j]) /
                     model.feature_sds[j];
        traj[i] = score - model.intercept;
    }
    return traj;
}

HeldoutReport evaluate_heldout(const LdaModel& model, const std::vector<Matrix>& val_session_rows,
                               const std::vector<std::vector<std::string>>& val_task_labels,
                               const ContrastSpec& contrast) {
    if (val_session_rows.empty() || val_session_rows.size() != val_task_labels.size())
        throw std::invalid_argument("evaluate_heldout: session/label count mismatch");
    const long n = val_session_rows.front().rows();
    for (std::size_t s = 0; s < val_session_rows.size(); ++s) {
        if (val_session_rows[s].rows() != n ||
            static_cast<long>(val_task_labels[s].size()) != n)
            throw std::invalid_argument("evaluate_heldout: validation sessions differ in length");
        if (val_task_labels[s] != val_task_labels.front())
            throw std::invalid_argument(
                "evaluate_heldout: validation sessions have differing task label sequences");
    }

    HeldoutReport report;
    report.mean_trajectory = Vector::Zero(n);
    long correct = 0, total = 0;
    for (std::size_t s = 0; s < val_session_rows.size(); ++s) {
        const Vector traj = project_lda(model, val_session_rows[s]);
        report.mean_trajectory += traj;
        for (long i = 0; i < n; ++i) {
            const auto& label = val_task_labels[s][i];
            int truth = 0;
            if (label == contrast.positive_label) truth = 1;
            else if (label == contrast.negative_label) truth = -1;
            else continue;
            correct += ((traj[i] > 0.0 ? 1 : -1) == truth);
            ++total;
        }
    }
    if (total == 0)
        throw std::invalid_argument("evaluate_heldout: no contrast-labeled time points");
    report.mean_trajectory /= static_cast<double>(val_session_rows.size());
    report.accuracy = static_cast<double>(correct) / total;
    report.n_contrast_points = static_cast<int>(total);

    // Pearson correlation with the +-1 indicator over contrast-labeled points.
    std::vector<double> traj_vals, indicator;
    for (long i = 0; i < n; ++i) {
        const auto& label = val_task_labels.front()[i];
        if (label == contrast.positive_label) {
            traj_vals.push_back(report.mean_trajectory[i]);
            indicator.push_back(1.0);
        } else if (label == contrast.negative_label) {
            traj_vals.push_back(report.mean_trajectory[i]);
            indicator.push_back(-1.0);
        }
    }
    const long m = static_cast<long>(traj_vals.size());
    double mt = 0.0, mi = 0.0;
    for (long i = 0; i < m; ++i) {
        mt += traj_vals[i];
        mi += indicator[i];
    }
    mt /= m;
    mi /= m;
    double num = 0.0, dt = 0.0, di = 0.0;
    for (long i = 0; i < m; ++i) {
        num += (traj_vals[i] - mt) * (indicator[i] - mi);
        dt += (traj_vals[i] - mt) * (traj_vals[i] - mt);
        di += (indicator[i] - mi) * (indicator[i] - mi);
    }
    report.task_correlation = (dt > 0.0 && di > 0.0) ? num / std::sqrt(dt * di) : 0.0;
    return report;
}

std::vector<EdgeWeight> lda_network(const LdaModel& model, const EdgeIndex& edge_index) {
    std::vector<EdgeWeight> out;
    out.reserve(model.selected_edges.size());
    for (std::size_t i = 0; i < model.selected_edges.size(); ++i) {
        const auto [j, k] = edge_index.pair(model.selected_edges[i]);
        out.push_back({j, k, model.weights[static_cast<long>(i)], 0});
    }
    std::stable_sort(out.begin(), out.end(), [](const EdgeWeight& a, const EdgeWeight& b) {
        return std::abs(a.weight) > std::abs(b.weight);
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

ContrastRows contrast_rows_by_subject(const StackedLaplacians& stacked,
                                      const ContrastSpec& contrast,
                                      const std::string& acquisition) {
    if (contrast.positive_label == contrast.negative_label)
        throw std::invalid_argument("contrast labels must be distinct");
    ContrastRows out;
    std::map<std::string, std::size_t> subject_slot;
    std::vector<std::vector<long>> row_lists;
    for (long r = 0; r < static_cast<long>(stacked.row_meta.size()); ++r) {
        const auto& meta = stacked.row_meta[r];
        if (!acquisition.empty() && meta.acquisition != acquisition) continue;
        if (meta.task != contrast.positive_label && meta.task != contrast.negative_label) continue;
        auto it = subject_slot.find(meta.subject_id);
        if (it == subject_slot.end()) {
            it = subject_slot.emplace(meta.subject_id, out.subject_ids.size()).first;
            out.subject_ids.push_back(meta.subject_id);
            row_lists.emplace_back();
        }
        row_lists[it->second].push_back(r);
    }
    for (std::size_t s = 0; s < row_lists.size(); ++s) {
        Matrix rows(row_lists[s].size(), stacked.matrix.cols());
        std::vector<int> labels(row_lists[s].size());
        for (std::size_t i = 0; i < row_lists[s].size(); ++i) {
            rows.row(i) = stacked.matrix.row(row_lists[s][i]);
            labels[i] =
                stacked.row_meta[row_lists[s][i]].task == contrast.positive_label ? 1 : -1;
        }
        out.rows.push_back(std::move(rows));
        out.labels.push_back(std::move(labels));
    }
    return out;
}

}  // namespace dyncon
