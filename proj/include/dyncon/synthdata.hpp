#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dyncon/single_solver.hpp"
#include "dyncon/types.hpp"

namespace dyncon {

/// Piecewise-constant ground-truth precision sequence.
struct GroundTruth {
    std::vector<Matrix> precision;  // n SPD p x p matrices, constant per segment
    std::vector<int> change_points;  // time indices i where Theta_i != Theta_{i-1}
    std::vector<std::vector<std::pair<int, int>>> true_edges;  // per segment
    std::vector<std::string> segment_labels;  // task label per segment
    std::vector<std::pair<int, int>> discriminative_edges;  // optional

    int n_timepoints() const { return static_cast<int>(precision.size()); }
    int n_nodes() const {
        return precision.empty() ? 0 : static_cast<int>(precision.front().rows());
    }
};

/// Random sparse SPD precision per segment: off-diagonal values uniform in
/// +-[0.2, 0.5], diagonal = row sum of |off-diag| + 0.5 (diagonal dominance).
GroundTruth generate_piecewise_network(int p, const std::vector<int>& segment_lengths,
                                       int edges_per_segment, std::uint64_t seed);

/// Independent zero-mean Gaussian rows with covariance Theta_i^{-1}
/// (Cholesky-based). Task labels come from segment identity.
SubjectSession sample_timeseries(const GroundTruth& truth, std::uint64_t seed);

struct TwoTaskPopulation {
    Population population;  // two sessions (LR, RL) per subject
    GroundTruth truth;      // LR block design, subject-shared structure only
};

/// Alternating task blocks ("taskA"/"taskB"); a shared base network plus a
/// condition-specific sign flip on n_discriminative designated edges, with
/// per-subject random variation of the non-discriminative structure. The RL
/// acquisition uses the reversed block order.
TwoTaskPopulation generate_two_task_population(int S, int n, int p, int n_discriminative,
                                               std::uint64_t seed);

struct RecoveryScore {
    std::vector<double> precision, recall, f1;  // per time point
    double mean_f1 = 0.0;
    int estimated_change_points = 0;
    int true_change_points = 0;
    int change_point_count_error = 0;  // estimated - true
    double mean_change_point_distance = 0.0;
};

/// Support comparison at kSupportEps plus change-point statistics.
RecoveryScore score_recovery(const PrecisionSequence& estimated, const GroundTruth& truth);

}  // namespace dyncon
