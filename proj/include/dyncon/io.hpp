#pragma once

#include <string>
#include <vector>

#include "dyncon/laplacian.hpp"
#include "dyncon/lda.hpp"
#include "dyncon/pca.hpp"
#include "dyncon/single_solver.hpp"
#include "dyncon/synthdata.hpp"
#include "dyncon/types.hpp"

namespace dyncon::io {

/// Shortest round-trippable decimal rendering of a double.
std::string fmt(double v);

/// Data TSV (header = node labels) plus one-label-per-line annotations.
void write_session(const SubjectSession& session, const std::string& data_path,
                   const std::string& annotation_path);

/// Text container with a metadata line and one "# t=<i>" block per time point.
void write_precision_sequence(const PrecisionSequence& prec, const std::string& path);
PrecisionSequence read_precision_sequence(const std::string& path);

/// Stacked matrix with "<nodeJ>--<nodeK>" header, plus a sibling row-meta TSV
/// (subject, acquisition, time, task).
void write_stacked(const StackedLaplacians& stacked, const std::string& matrix_path,
                   const std::string& meta_path);

void write_screen_result(const ScreenResult& screen, const EdgeIndex& edge_index,
                         const std::vector<std::string>& node_labels, const std::string& path);

void write_lda_model(const LdaModel& model, const EdgeIndex& edge_index,
                     const std::vector<std::string>& node_labels, const std::string& path);
LdaModel read_lda_model(const std::string& path, const EdgeIndex& edge_index,
                        const std::vector<std::string>& node_labels);

/// TSV with columns time, task_label, then one column per trajectory row.
void write_trajectory(const Matrix& trajectory_k_by_n, const std::vector<std::string>& task_labels,
                      const std::string& column_prefix, const std::string& path);

/// TSV with columns node_j, node_k, weight, rank.
void write_network(const std::vector<EdgeWeight>& edges,
                   const std::vector<std::string>& node_labels, const std::string& path);

struct ManifestEntry {
    std::string subject_id, acquisition, data_path, annotation_path;
};
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);

void write_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth read_ground_truth(const std::string& path);

}  // namespace dyncon::io
