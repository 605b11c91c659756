#include "dyncon/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace dyncon {

namespace {

using Rng = std::mt19937_64;

std::vector<std::pair<int, int>> all_pairs(int p) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(p * (p - 1) / 2);
    for (int j = 0; j < p; ++j)
        for (int k = j + 1; k < p; ++k) pairs.emplace_back(j, k);
    return pairs;
}

std::vector<std::pair<int, int>> sample_pairs(std::vector<std::pair<int, int>> pool, int count,
                                              Rng& rng) {
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

double edge_value(Rng& rng) {
    std::uniform_real_distribution<double> mag(0.2, 0.5);
    std::uniform_int_distribution<int> sign(0, 1);
    const double v = mag(rng);
    return sign(rng) ? v : -v;
}

void set_dominant_diagonal(Matrix& theta) {
    for (int j = 0; j < theta.rows(); ++j) {
        double row_sum = 0.0;
        for (int k = 0; k < theta.cols(); ++k)
            if (k != j) row_sum += std::abs(theta(j, k));
        theta(j, j) = row_sum + 0.5;
    }
}

std::string node_label(int j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%02d", j + 1);
    return buf;
}

}  // namespace

GroundTruth generate_piecewise_network(int p, const std::vector<int>& segment_lengths,
                                       int edges_per_segment, std::uint64_t seed) {
    if (p < 2) throw std::invalid_argument("generate_piecewise_network: p must be >= 2");
    if (segment_lengths.empty())
        throw std::invalid_argument("generate_piecewise_network: no segments");
    const int max_edges = p * (p - 1) / 2;
    if (edges_per_segment < 0 || edges_per_segment > max_edges)
        throw std::invalid_argument("generate_piecewise_network: edges_per_segment out of range");

    Rng rng(seed);
    GroundTruth truth;
    int t = 0;
    for (std::size_t s = 0; s < segment_lengths.size(); ++s) {
        if (segment_lengths[s] < 1)
            throw std::invalid_argument("generate_piecewise_network: segment length < 1");
        auto support = sample_pairs(all_pairs(p), edges_per_segment, rng);
        Matrix theta = Matrix::Zero(p, p);
        for (const auto& [j, k] : support) {
            const double v = edge_value(rng);
            theta(j, k) = v;
            theta(k, j) = v;
        }
        set_dominant_diagonal(theta);
        truth.true_edges.push_back(std::move(support));
        truth.segment_labels.push_back("seg" + std::to_string(s));
        if (s > 0) truth.change_points.push_back(t);
        for (int i = 0; i < segment_lengths[s]; ++i) truth.precision.push_back(theta);
        t += segment_lengths[s];
    }
    return truth;
}

SubjectSession sample_timeseries(const GroundTruth& truth, std::uint64_t seed) {
    const int n = truth.n_timepoints();
    const int p = truth.n_nodes();
    if (n == 0) throw std::invalid_argument("sample_timeseries: empty ground truth");

    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    SubjectSession session;
    session.data.resize(n, p);
    session.node_labels.resize(p);
    for (int j = 0; j < p; ++j) session.node_labels[j] = node_label(j);
    session.task_labels.resize(n);

    Eigen::LLT<Matrix> llt;
    int segment = 0;
    for (int i = 0; i < n; ++i) {
        if (i == 0 || (truth.precision[i] - truth.precision[i - 1]).cwiseAbs().maxCoeff() > 0.0) {
            if (i > 0) ++segment;
            llt.compute(truth.precision[i]);
            if (llt.info() != Eigen::Success)
                throw std::invalid_argument("sample_timeseries: precision at time " +
                                            std::to_string(i) + " is not positive definite");
        }
        // x ~ N(0, Theta^{-1}) via L^T x = z with Theta = L L^T
        Vector z(p);
        for (int j = 0; j < p; ++j) z[j] = normal(rng);
        session.data.row(i) =
            llt.matrixL().transpose().solve(z).transpose();
        session.task_labels[i] = segment < static_cast<int>(truth.segment_labels.size())
                                     ? truth.segment_labels[segment]
                                     : "seg" + std::to_string(segment);
    }
    return session;
}

namespace {

// Segment lengths for `blocks` near-equal alternating task blocks.
std::vector<int> block_lengths(int n, int blocks) {
    std::vector<int> lengths(blocks, n / blocks);
    for (int b = 0; b < n % blocks; ++b) ++lengths[b];
    return lengths;
}

GroundTruth block_truth(const Matrix& theta_a, const Matrix& theta_b,
                        const std::vector<std::vector<std::pair<int, int>>>& edges_ab,
                        const std::vector<int>& lengths, bool start_with_a) {
    GroundTruth truth;
    int t = 0;
    for (std::size_t b = 0; b < lengths.size(); ++b) {
        const bool is_a = start_with_a ? (b % 2 == 0) : (b % 2 == 1);
        truth.precision.insert(truth.precision.end(), lengths[b], is_a ? theta_a : theta_b);
        truth.true_edges.push_back(edges_ab[is_a ? 0 : 1]);
        truth.segment_labels.push_back(is_a ? "taskA" : "taskB");
        if (b > 0) truth.change_points.push_back(t);
        t += lengths[b];
    }
    return truth;
}

}  // namespace

TwoTaskPopulation generate_two_task_population(int S, int n, int p, int n_discriminative,
                                               std::uint64_t seed) {
    if (S < 1 || n < 2 || p < 2)
        throw std::invalid_argument("generate_two_task_population: S, n, p too small");
    const int max_edges = p * (p - 1) / 2;
    if (n_discriminative < 0 || n_discriminative > max_edges)
        throw std::invalid_argument("generate_two_task_population: n_discriminative out of range");

    Rng rng(seed);

    // Designated discriminative edges plus a shared base network on the rest.
    auto pool = all_pairs(p);
    auto designated = sample_pairs(pool, n_discriminative, rng);
    std::set<std::pair<int, int>> taken(designated.begin(), designated.end());
    std::vector<std::pair<int, int>> remaining;
    for (const auto& e : pool)
        if (!taken.count(e)) remaining.push_back(e);
    const int n_base = std::min<int>(p, static_cast<int>(remaining.size()));
    auto base_edges = sample_pairs(remaining, n_base, rng);
    for (const auto& e : base_edges) taken.insert(e);

    Matrix base = Matrix::Zero(p, p);
    for (const auto& [j, k] : base_edges) {
        const double v = edge_value(rng);
        base(j, k) = v;
        base(k, j) = v;
    }

    const double kContrast = 0.35;
    auto condition_matrix = [&](const Matrix& subject_base, double sign) {
        Matrix theta = subject_base;
        for (const auto& [j, k] : designated) {
            theta(j, k) = sign * kContrast;
            theta(k, j) = sign * kContrast;
        }
        set_dominant_diagonal(theta);
        return theta;
    };

    auto edge_union = [&](const Matrix& theta) {
        std::vector<std::pair<int, int>> edges;
        for (int j = 0; j < p; ++j)
            for (int k = j + 1; k < p; ++k)
                if (std::abs(theta(j, k)) > kSupportEps) edges.emplace_back(j, k);
        return edges;
    };

    const auto lengths = block_lengths(n, std::min(4, std::max(2, n / 10)));

    TwoTaskPopulation out;
    {
        const Matrix truth_a = condition_matrix(base, +1.0);
        const Matrix truth_b = condition_matrix(base, -1.0);
        out.truth = block_truth(truth_a, truth_b, {edge_union(truth_a), edge_union(truth_b)},
                                lengths, /*start_with_a=*/true);
        out.truth.discriminative_edges = designated;
    }

    std::vector<std::pair<int, int>> free_edges;
    for (const auto& e : pool)
        if (!taken.count(e)) free_edges.push_back(e);

    for (int s = 0; s < S; ++s) {
        // Subject-specific extra edges, shared across conditions and acquisitions.
        Matrix subject_base = base;
        const int n_extra = std::min<int>(p / 2, static_cast<int>(free_edges.size()));
        for (const auto& [j, k] : sample_pairs(free_edges, n_extra, rng)) {
            const double v = edge_value(rng);
            subject_base(j, k) = v;
            subject_base(k, j) = v;
        }
        const Matrix theta_a = condition_matrix(subject_base, +1.0);
        const Matrix theta_b = condition_matrix(subject_base, -1.0);
        const std::vector<std::vector<std::pair<int, int>>> edges_ab = {edge_union(theta_a),
                                                                        edge_union(theta_b)};
        char sid[16];
        std::snprintf(sid, sizeof sid, "sub%03d", s + 1);
        for (const std::string& acq : {"LR", "RL"}) {
            const GroundTruth session_truth =
                block_truth(theta_a, theta_b, edges_ab, lengths, acq == "LR");
            SubjectSession session = sample_timeseries(session_truth, rng());
            session.subject_id = sid;
            session.acquisition = acq;
            out.population.sessions.push_back(std::move(session));
        }
    }
    return out;
}

RecoveryScore score_recovery(const PrecisionSequence& estimated, const GroundTruth& truth) {
    const int n = estimated.n_timepoints();
    const int p = estimated.n_nodes();
    if (n != truth.n_timepoints() || p != truth.n_nodes())
        throw std::invalid_argument("score_recovery: shape mismatch");

    RecoveryScore score;
    score.precision.resize(n);
    score.recall.resize(n);
    score.f1.resize(n);

    // Segment index per time point.
    std::vector<int> segment(n, 0);
    for (int i = 1; i < n; ++i) {
        const bool change =
            (truth.precision[i] - truth.precision[i - 1]).cwiseAbs().maxCoeff() > kSupportEps;
        segment[i] = segment[i - 1] + (change ? 1 : 0);
    }

    double f1_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::set<std::pair<int, int>> est(estimated.support[i].begin(),
                                                estimated.support[i].end());
        const auto& true_set = truth.true_edges[segment[i]];
        int tp = 0;
        for (const auto& e : true_set) tp += est.count(e);
        const int fp = static_cast<int>(est.size()) - tp;
        const int fn = static_cast<int>(true_set.size()) - tp;
        score.precision[i] = est.empty() ? (true_set.empty() ? 1.0 : 0.0)
                                         : static_cast<double>(tp) / (tp + fp);
        score.recall[i] = true_set.empty() ? 1.0 : static_cast<double>(tp) / (tp + fn);
        score.f1[i] = (score.precision[i] + score.recall[i] > 0.0)
                          ? 2.0 * score.precision[i] * score.recall[i] /
                                (score.precision[i] + score.recall[i])
                          : 0.0;
        f1_sum += score.f1[i];
    }
    score.mean_f1 = f1_sum / n;

    std::vector<int> est_cps;
    for (int i = 1; i < n; ++i)
        if ((estimated.matrices[i] - estimated.matrices[i - 1]).cwiseAbs().maxCoeff() >
            kSupportEps)
            est_cps.push_back(i);
    score.estimated_change_points = static_cast<int>(est_cps.size());
    score.true_change_points = static_cast<int>(truth.change_points.size());
    score.change_point_count_error = score.estimated_change_points - score.true_change_points;
    double dist_sum = 0.0;
    for (int cp : est_cps) {
        double best = truth.change_points.empty() ? 0.0
                                                  : std::numeric_limits<double>::infinity();
        for (int tc : truth.change_points) best = std::min(best, std::abs(double(cp - tc)));
        dist_sum += best;
    }
    score.mean_change_point_distance = est_cps.empty() ? 0.0 : dist_sum / est_cps.size();
    return score;
}

}  // namespace dyncon
