#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace dyncon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One subject/acquisition recording: n time points over p nodes,
/// with a task label per time point.
struct SubjectSession {
    std::string subject_id;
    std::string acquisition;
    Matrix data;  // n x p
    std::vector<std::string> node_labels;
    double sampling_interval = 1.0;  // seconds per time point
    std::vector<std::string> task_labels;

    int n_timepoints() const { return static_cast<int>(data.rows()); }
    int n_nodes() const { return static_cast<int>(data.cols()); }
};

/// Throws std::invalid_argument if the session violates its invariants
/// (finite data, n >= 2, p >= 2, label lengths, unique node labels).
void validate_session(const SubjectSession& session);

/// Ordered collection of sessions sharing a common node set.
struct Population {
    std::vector<SubjectSession> sessions;

    /// Number of distinct subject ids.
    int n_subjects() const;
};

/// Throws if sessions disagree on node labels or any session is invalid.
void validate_population(const Population& population);

}  // namespace dyncon
