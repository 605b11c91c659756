#include "dyncon/types.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace dyncon {

void validate_session(const SubjectSession& session) {
    const auto n = session.data.rows();
    const auto p = session.data.cols();
    if (n < 2 || p < 2)
        throw std::invalid_argument("session '" + session.subject_id +
                                    "': need at least 2 time points and 2 nodes, got n=" +
                                    std::to_string(n) + ", p=" + std::to_string(p));
    if (!session.data.allFinite())
        throw std::invalid_argument("session '" + session.subject_id +
                                    "': data contains non-finite values");
    if (static_cast<Eigen::Index>(session.task_labels.size()) != n)
        throw std::invalid_argument("session '" + session.subject_id + "': " +
                                    std::to_string(session.task_labels.size()) +
                                    " task labels for " + std::to_string(n) + " time points");
    if (static_cast<Eigen::Index>(session.node_labels.size()) != p)
        throw std::invalid_argument("session '" + session.subject_id + "': " +
                                    std::to_string(session.node_labels.size()) +
                                    " node labels for " + std::to_string(p) + " nodes");
    std::set<std::string> unique(session.node_labels.begin(), session.node_labels.end());
    if (unique.size() != session.node_labels.size())
        throw std::invalid_argument("session '" + session.subject_id +
                                    "': duplicate node labels");
    if (!(session.sampling_interval > 0.0))
        throw std::invalid_argument("session '" + session.subject_id +
                                    "': sampling_interval must be positive");
}

int Population::n_subjects() const {
    std::set<std::string> ids;
    for (const auto& s : sessions) ids.insert(s.subject_id);
    return static_cast<int>(ids.size());
}

void validate_population(const Population& population) {
    if (population.sessions.empty())
        throw std::invalid_argument("population has no sessions");
    const auto& labels = population.sessions.front().node_labels;
    for (const auto& s : population.sessions) {
        validate_session(s);
        if (s.node_labels != labels)
            throw std::invalid_argument("session '" + s.subject_id +
                                        "' node labels differ from the first session");
    }
}

}  // namespace dyncon
