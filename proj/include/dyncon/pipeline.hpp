#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyncon/laplacian.hpp"
#include "dyncon/types.hpp"

namespace dyncon {

/// Bad configuration (exit code 2 at the CLI, vs 3 for runtime failures).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    // [data]
    std::string manifest;  // empty: use <output_dir>/manifest.tsv (e.g. from simulate)
    std::string output_dir = "out";
    double sampling_interval = 1.0;

    // [preprocess]
    double highpass_cutoff = 0.0;  // Hz; 0 disables
    bool standardize = true;

    // [covariance]
    double bandwidth = 0.0;  // fixed when > 0, otherwise selected from the grid
    std::vector<double> bandwidth_grid;

    // [solver] single-element grids mean a fixed value; larger grids are tuned
    std::vector<double> lambda1_grid{0.1};
    std::vector<double> lambda2_grid{0.1};
    double rho = 1.0;
    double eps_abs = 1e-5;
    double eps_rel = 1e-5;
    int max_iter = 2000;
    bool penalize_diagonal = false;
    bool adaptive_rho = false;

    // [embed]
    int k = 2;
    double retain_fraction = 0.02;
    bool center_pca = true;
    DegreeMode degree_mode = DegreeMode::PrecisionDiagonal;

    // [lda]
    std::string contrast_positive = "taskA";
    std::string contrast_negative = "taskB";
    std::string train_acquisition = "LR";
    std::string validation_acquisition = "RL";
    double tau = 0.6;
    int cv_folds = 5;
    double shrinkage = 0.1;
    std::vector<double> lda_lambda_grid;  // empty: derived from the data

    // [simulate]
    int sim_subjects = 5;
    int sim_timepoints = 120;
    int sim_nodes = 10;
    int sim_discriminative = 4;

    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const;  // throws ConfigError
    std::string manifest_path() const;
};

/// key = value sections: [data] [preprocess] [covariance] [solver] [embed]
/// [lda] [simulate]. Unknown keys are errors.
PipelineConfig parse_config(const std::string& path);

void run_simulate(const PipelineConfig& config);
void run_estimate(const PipelineConfig& config);
void run_embed_pca(const PipelineConfig& config);
void run_embed_lda(const PipelineConfig& config);
void run_evaluate(const PipelineConfig& config);
void run_pipeline(const PipelineConfig& config);

}  // namespace dyncon
