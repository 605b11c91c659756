#pragma once

#include <string>

#include "dyncon/types.hpp"

namespace dyncon {

/// Loads a tab-separated data file (header row = node labels, one row per
/// time point) plus a one-label-per-line annotation file.
/// Errors carry file and line context.
SubjectSession load_session(const std::string& data_path, const std::string& annotation_path,
                            const std::string& subject_id, const std::string& acquisition,
                            double sampling_interval = 1.0);

/// Removes slow drift below `cutoff_hz` from every column by regressing out
/// the discrete-cosine basis vectors with frequency below the cutoff
/// (plus the constant). Column means become zero.
SubjectSession highpass_filter(const SubjectSession& session, double cutoff_hz);

/// Number of DCT regressors (constant included) removed by highpass_filter.
int highpass_basis_size(int n, double sampling_interval, double cutoff_hz);

/// Rescales each column to mean 0, sample variance 1 (n-1 divisor).
/// Throws naming the node if a column has zero variance.
SubjectSession standardize(const SubjectSession& session);

}  // namespace dyncon
