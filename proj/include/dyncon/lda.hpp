#pragma once

#include <string>
#include <vector>

#include "dyncon/laplacian.hpp"
#include "dyncon/pca.hpp"
#include "dyncon/types.hpp"

namespace dyncon {

struct ContrastSpec {
    std::string positive_label;
    std::string negative_label;
};

struct ScreenResult {
    Vector selection_frequency;      // per edge, fraction of subjects selecting it
    std::vector<int> selected_edges;  // frequency >= tau, edge-index order
    double tau = 0.6;
    int p_prime = 0;
};

struct LdaModel {
    Vector weights;  // unit length, over selected edges
    double intercept = 0.0;
    std::vector<int> selected_edges;
    double shrinkage = 0.1;
    Vector feature_means, feature_sds;  // training standardization, per selected edge
    ContrastSpec contrast;
};

/// Geometric lambda grid from the null-solution threshold of the penalized
/// scoring regression down to min_ratio times it.
std::vector<double> make_lambda_grid(const Matrix& rows, const std::vector<int>& labels,
                                     int n_values = 10, double min_ratio = 0.01);

/// One subject's l1-penalized two-class LDA via penalized optimal scoring:
/// lasso (+ small ridge) regression of centered class indicators on
/// standardized columns, cyclic coordinate descent, lambda chosen by
/// stratified k-fold CV on held-out accuracy (ties to larger lambda).
/// Returns the nonzero-coefficient edge set. `labels` are +1/-1.
std::vector<int> sparse_lda_subject(const Matrix& rows, const std::vector<int>& labels,
                                    const std::vector<double>& lambda_grid, int cv_folds);

/// Selection frequency across per-subject sets; edges at frequency >= tau
/// (boundary inclusive) are kept.
ScreenResult stability_screen(const std::vector<std::vector<int>>& per_subject_sets, int n_edges,
                              double tau);

/// Pooled shrinkage LDA over the selected edges:
///   w = ((1-g) S_w + g diag(S_w))^{-1} (mu_pos - mu_neg), unit-normalized,
/// decision boundary through the midpoint of projected class means.
LdaModel fit_lda(const Matrix& rows, const std::vector<int>& labels,
                 const std::vector<int>& selected_edges, const ContrastSpec& contrast,
                 double shrinkage);

/// Discriminant score of every row (all time points, any label).
Vector project_lda(const LdaModel& model, const Matrix& session_rows);

struct HeldoutReport {
    double accuracy = 0.0;
    Vector mean_trajectory;
    double task_correlation = 0.0;
    int n_contrast_points = 0;
};

/// Sign-classification accuracy, mean trajectory, and Pearson correlation of
/// the mean trajectory with the +-1 task indicator over contrast-labeled
/// time points. All validation sessions must share length and label sequence.
HeldoutReport evaluate_heldout(const LdaModel& model, const std::vector<Matrix>& val_session_rows,
                               const std::vector<std::vector<std::string>>& val_task_labels,
                               const ContrastSpec& contrast);

/// One signed weight per selected edge; sign is relative to the positive class.
std::vector<EdgeWeight> lda_network(const LdaModel& model, const EdgeIndex& edge_index);

/// Rows of `stacked` whose task label matches the contrast, grouped by
/// subject (order of first appearance), restricted to `acquisition` when
/// nonempty. Returns per-subject row matrices and +1/-1 labels.
struct ContrastRows {
    std::vector<std::string> subject_ids;
    std::vector<Matrix> rows;                 // per subject
    std::vector<std::vector<int>> labels;     // per subject, +1/-1
};
ContrastRows contrast_rows_by_subject(const StackedLaplacians& stacked,
                                      const ContrastSpec& contrast,
                                      const std::string& acquisition);

}  // namespace dyncon
