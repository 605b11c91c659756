#include "dyncon/pipeline.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dyncon/covariance.hpp"
#include "dyncon/ingest.hpp"
#include "dyncon/io.hpp"
#include "dyncon/lda.hpp"
#include "dyncon/pca.hpp"
#include "dyncon/single_solver.hpp"
#include "dyncon/synthdata.hpp"

namespace fs = std::filesystem;

namespace dyncon {

namespace {

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("DYNCON_LOG");
        if (!env) return 1;
        const std::string v = env;
        if (v == "quiet") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

void log_info(const char* message) {
    if (log_level() >= 1) std::fprintf(stderr, "%s\n", message);
}

template <typename... Args>
void log_info(const char* format, Args... args) {
    if (log_level() >= 1) {
        std::fprintf(stderr, format, args...);
        std::fprintf(stderr, "\n");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("config key '" + key + "': expected boolean, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    try {
        std::size_t pos;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (!tok.empty()) out.push_back(parse_num(tok, key));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::string trim(std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
}

}  // namespace

void PipelineConfig::validate() const {
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
    if (highpass_cutoff < 0.0) throw ConfigError("highpass_cutoff must be >= 0");
    if (!(sampling_interval > 0.0)) throw ConfigError("sampling_interval must be positive");
    if (bandwidth < 0.0) throw ConfigError("bandwidth must be >= 0");
    if (bandwidth == 0.0 && bandwidth_grid.empty())
        throw ConfigError("either a bandwidth or a bandwidth_grid is required");
    for (double l : lambda1_grid)
        if (l < 0.0) throw ConfigError("lambda1 values must be >= 0");
    for (double l : lambda2_grid)
        if (l < 0.0) throw ConfigError("lambda2 values must be >= 0");
    if (!(rho > 0.0)) throw ConfigError("rho must be positive");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (!(retain_fraction > 0.0) || retain_fraction > 1.0)
        throw ConfigError("retain_fraction must be in (0, 1]");
    if (!(tau > 0.0) || tau > 1.0) throw ConfigError("tau must be in (0, 1]");
    if (cv_folds < 2) throw ConfigError("cv_folds must be >= 2");
    if (shrinkage < 0.0 || shrinkage > 1.0) throw ConfigError("shrinkage must be in [0, 1]");
    if (contrast_positive == contrast_negative)
        throw ConfigError("contrast labels must be distinct");
    if (sim_subjects < 1 || sim_timepoints < 2 || sim_nodes < 2)
        throw ConfigError("simulate sizes too small");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

std::string PipelineConfig::manifest_path() const {
    return manifest.empty() ? (fs::path(output_dir) / "manifest.tsv").string() : manifest;
}

PipelineConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    PipelineConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "data.manifest") cfg.manifest = value;
        else if (key == "data.output_dir") cfg.output_dir = value;
        else if (key == "data.sampling_interval") cfg.sampling_interval = parse_num(value, key);
        else if (key == "preprocess.highpass_cutoff") cfg.highpass_cutoff = parse_num(value, key);
        else if (key == "preprocess.standardize") cfg.standardize = parse_bool(value, key);
        else if (key == "covariance.bandwidth") cfg.bandwidth = parse_num(value, key);
        else if (key == "covariance.bandwidth_grid") cfg.bandwidth_grid = parse_list(value, key);
        else if (key == "solver.lambda1") cfg.lambda1_grid = {parse_num(value, key)};
        else if (key == "solver.lambda2") cfg.lambda2_grid = {parse_num(value, key)};
        else if (key == "solver.lambda1_grid") cfg.lambda1_grid = parse_list(value, key);
        else if (key == "solver.lambda2_grid") cfg.lambda2_grid = parse_list(value, key);
        else if (key == "solver.rho") cfg.rho = parse_num(value, key);
        else if (key == "solver.eps_abs") cfg.eps_abs = parse_num(value, key);
        else if (key == "solver.eps_rel") cfg.eps_rel = parse_num(value, key);
        else if (key == "solver.max_iter") cfg.max_iter = static_cast<int>(parse_num(value, key));
        else if (key == "solver.penalize_diagonal") cfg.penalize_diagonal = parse_bool(value, key);
        else if (key == "solver.adaptive_rho") cfg.adaptive_rho = parse_bool(value, key);
        else if (key == "embed.k") cfg.k = static_cast<int>(parse_num(value, key));
        else if (key == "embed.retain_fraction") cfg.retain_fraction = parse_num(value, key);
        else if (key == "embed.center_pca") cfg.center_pca = parse_bool(value, key);
        else if (key == "embed.degree_mode") {
            if (value == "precision") cfg.degree_mode = DegreeMode::PrecisionDiagonal;
            else if (value == "marginal") cfg.degree_mode = DegreeMode::MarginalVariance;
            else throw ConfigError("embed.degree_mode must be 'precision' or 'marginal'");
        } else if (key == "lda.contrast_positive") cfg.contrast_positive = value;
        else if (key == "lda.contrast_negative") cfg.contrast_negative = value;
        else if (key == "lda.train_acquisition") cfg.train_acquisition = value;
        else if (key == "lda.validation_acquisition") cfg.validation_acquisition = value;
        else if (key == "lda.tau") cfg.tau = parse_num(value, key);
        else if (key == "lda.cv_folds") cfg.cv_folds = static_cast<int>(parse_num(value, key));
        else if (key == "lda.shrinkage") cfg.shrinkage = parse_num(value, key);
        else if (key == "lda.lambda_grid") cfg.lda_lambda_grid = parse_list(value, key);
        else if (key == "simulate.subjects")
            cfg.sim_subjects = static_cast<int>(parse_num(value, key));
        else if (key == "simulate.timepoints")
            cfg.sim_timepoints = static_cast<int>(parse_num(value, key));
        else if (key == "simulate.nodes") cfg.sim_nodes = static_cast<int>(parse_num(value, key));
        else if (key == "simulate.discriminative_edges")
            cfg.sim_discriminative = static_cast<int>(parse_num(value, key));
        else if (key == "simulate.seed" || key == "data.seed")
            cfg.seed = static_cast<std::uint64_t>(parse_num(value, key));
        else if (key == "data.workers")
            cfg.workers = static_cast<int>(parse_num(value, key));
        else
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
    }
    cfg.validate();
    return cfg;
}

namespace {

Population load_population(const PipelineConfig& cfg) {
    const auto entries = io::read_manifest(cfg.manifest_path());
    if (entries.empty()) throw ConfigError("manifest has no sessions: " + cfg.manifest_path());
    Population pop;
    for (const auto& e : entries) {
        SubjectSession session = load_session(e.data_path, e.annotation_path, e.subject_id,
                                              e.acquisition, cfg.sampling_interval);
        if (cfg.highpass_cutoff > 0.0) session = highpass_filter(session, cfg.highpass_cutoff);
        if (cfg.standardize) session = standardize(session);
        pop.sessions.push_back(std::move(session));
    }
    validate_population(pop);
    return pop;
}

std::string estimate_path(const PipelineConfig& cfg, const SubjectSession& session) {
    return (fs::path(cfg.output_dir) / "estimates" /
            (session.subject_id + "_" + session.acquisition + ".theta.tsv"))
        .string();
}

std::vector<PrecisionSequence> load_estimates(const PipelineConfig& cfg, const Population& pop) {
    std::vector<PrecisionSequence> estimates;
    for (const auto& session : pop.sessions) {
        const std::string path = estimate_path(cfg, session);
        if (!fs::exists(path))
            throw std::runtime_error("missing estimate file (run 'estimate' first): " + path);
        PrecisionSequence prec = io::read_precision_sequence(path);
        if (prec.n_timepoints() != session.n_timepoints())
            throw std::runtime_error(path + ": estimate length does not match session data");
        estimates.push_back(std::move(prec));
    }
    return estimates;
}

StackedLaplacians stacked_from_estimates(const PipelineConfig& cfg, const Population& pop,
                                         const std::vector<PrecisionSequence>& estimates) {
    std::vector<LaplacianSequence> seqs;
    seqs.reserve(estimates.size());
    for (const auto& prec : estimates) seqs.push_back(laplacian_sequence(prec, cfg.degree_mode));
    return stack_population(pop, seqs);
}

std::vector<std::pair<long, long>> session_blocks(const StackedLaplacians& stacked) {
    std::vector<std::pair<long, long>> blocks;
    const auto& meta = stacked.row_meta;
    for (long r = 0; r < static_cast<long>(meta.size()); ++r) {
        if (r == 0 || meta[r].subject_id != meta[r - 1].subject_id ||
            meta[r].acquisition != meta[r - 1].acquisition)
            blocks.emplace_back(r, r);
        blocks.back().second = r + 1;
    }
    return blocks;
}

}  // namespace

void run_simulate(const PipelineConfig& cfg) {
    cfg.validate();
    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir / "data");

    log_info("simulate: S=%d n=%d p=%d discriminative=%d seed=%llu", cfg.sim_subjects,
             cfg.sim_timepoints, cfg.sim_nodes, cfg.sim_discriminative,
             static_cast<unsigned long long>(cfg.seed));
    const TwoTaskPopulation synth = generate_two_task_population(
        cfg.sim_subjects, cfg.sim_timepoints, cfg.sim_nodes, cfg.sim_discriminative, cfg.seed);

    std::vector<io::ManifestEntry> entries;
    for (const auto& session : synth.population.sessions) {
        const std::string stem = session.subject_id + "_" + session.acquisition;
        const std::string data_path = (out_dir / "data" / (stem + ".tsv")).string();
        const std::string ann_path = (out_dir / "data" / (stem + ".labels.txt")).string();
        io::write_session(session, data_path, ann_path);
        entries.push_back({session.subject_id, session.acquisition, data_path, ann_path});
    }
    io::write_manifest(entries, (out_dir / "manifest.tsv").string());
    io::write_ground_truth(synth.truth, (out_dir / "truth.tsv").string());
}

void run_estimate(const PipelineConfig& cfg) {
    cfg.validate();
    const Population pop = load_population(cfg);
    fs::create_directories(fs::path(cfg.output_dir) / "estimates");

    const int n_sessions = static_cast<int>(pop.sessions.size());
    std::vector<PrecisionSequence> results(n_sessions);
    std::vector<double> bandwidths(n_sessions, cfg.bandwidth);
    std::vector<std::string> errors(n_sessions);

#pragma omp parallel for schedule(dynamic) num_threads(cfg.workers) if (cfg.workers > 1)
    for (int s = 0; s < n_sessions; ++s) {
        try {
            const auto& session = pop.sessions[s];
            double bandwidth = cfg.bandwidth;
            if (bandwidth == 0.0) bandwidth = select_bandwidth(session, cfg.bandwidth_grid);
            bandwidths[s] = bandwidth;
            const CovarianceSequence cov = kernel_weighted_covariances(session, bandwidth);

            SolverConfig solver;
            solver.rho = cfg.rho;
            solver.eps_abs = cfg.eps_abs;
            solver.eps_rel = cfg.eps_rel;
            solver.max_iter = cfg.max_iter;
            solver.penalize_diagonal = cfg.penalize_diagonal;
            solver.adaptive_rho = cfg.adaptive_rho;
            if (cfg.lambda1_grid.size() == 1 && cfg.lambda2_grid.size() == 1) {
                solver.lambda1 = cfg.lambda1_grid.front();
                solver.lambda2 = cfg.lambda2_grid.front();
            } else {
                solver = tune_hyperparams(cov, cfg.lambda1_grid, cfg.lambda2_grid, solver);
            }
            results[s] = solve_single(cov, solver);
            log_info("estimate: %s_%s bandwidth=%g lambda1=%g lambda2=%g iterations=%d%s",
                     session.subject_id.c_str(), session.acquisition.c_str(), bandwidth,
                     solver.lambda1, solver.lambda2, results[s].iterations,
                     results[s].converged ? "" : " (NOT CONVERGED)");
        } catch (const std::exception& e) {
            errors[s] = e.what();
        }
    }

    // single-writer phase
    std::ofstream report(fs::path(cfg.output_dir) / "estimates" / "tuning.tsv");
    report << "subject_id\tacquisition\tbandwidth\tlambda1\tlambda2\tconverged\titerations"
              "\tobjective\n";
    std::vector<std::string> failures;
    for (int s = 0; s < n_sessions; ++s) {
        const auto& session = pop.sessions[s];
        const std::string tag = session.subject_id + "_" + session.acquisition;
        if (!errors[s].empty()) {
            failures.push_back(tag + ": " + errors[s]);
            continue;
        }
        io::write_precision_sequence(results[s], estimate_path(cfg, session));
        report << session.subject_id << "\t" << session.acquisition << "\t"
               << io::fmt(bandwidths[s]) << "\t" << io::fmt(results[s].lambda1) << "\t"
               << io::fmt(results[s].lambda2) << "\t" << (results[s].converged ? 1 : 0) << "\t"
               << results[s].iterations << "\t" << io::fmt(results[s].objective_value) << "\n";
        if (!results[s].converged)
            failures.push_back(tag + ": solver did not converge (primal=" +
                               io::fmt(results[s].primal_residual) + ", dual=" +
                               io::fmt(results[s].dual_residual) + ")");
    }
    if (!failures.empty()) {
        std::string message = "estimate failures:";
        for (const auto& f : failures) message += "\n  " + f;
        throw std::runtime_error(message);
    }
}

void run_embed_pca(const PipelineConfig& cfg) {
    cfg.validate();
    const Population pop = load_population(cfg);
    const auto estimates = load_estimates(cfg, pop);
    const StackedLaplacians stacked = stacked_from_estimates(cfg, pop, estimates);

    const fs::path pca_dir = fs::path(cfg.output_dir) / "pca";
    fs::create_directories(pca_dir);
    io::write_stacked(stacked, (pca_dir / "stacked.tsv").string(),
                      (pca_dir / "rowmeta.tsv").string());

    const PcaModel model = fit_pca(stacked, cfg.k, cfg.center_pca);
    {
        std::ofstream out(pca_dir / "model.tsv");
        out << "# k=" << model.k << " total_variance=" << io::fmt(model.total_variance)
            << "\n# eigenvalues=";
        for (int c = 0; c < model.k; ++c) out << (c ? "," : "") << io::fmt(model.eigenvalues[c]);
        out << "\nedge\tmean";
        for (int c = 0; c < model.k; ++c) out << "\tcomp_" << (c + 1);
        out << "\n";
        for (int e = 0; e < model.edge_index.n_edges(); ++e) {
            out << model.edge_index.edge_name(e, model.node_labels) << "\t"
                << io::fmt(model.column_means[e]);
            for (int c = 0; c < model.k; ++c) out << "\t" << io::fmt(model.components(c, e));
            out << "\n";
        }
    }

    const auto blocks = session_blocks(stacked);
    std::set<std::string> acquisitions;
    for (const auto& [begin, end] : blocks) {
        const auto& meta = stacked.row_meta[begin];
        acquisitions.insert(meta.acquisition);
        const Matrix traj = project_pca(model, stacked.matrix.middleRows(begin, end - begin));
        std::vector<std::string> labels;
        for (long r = begin; r < end; ++r) labels.push_back(stacked.row_meta[r].task);
        io::write_trajectory(
            traj, labels, "comp_",
            (pca_dir / ("trajectory_" + meta.subject_id + "_" + meta.acquisition + ".tsv"))
                .string());
    }
    for (const auto& acq : acquisitions) {
        try {
            const Matrix mean = mean_trajectory(model, stacked, acq);
            std::vector<std::string> labels;
            for (const auto& [begin, end] : blocks) {
                if (stacked.row_meta[begin].acquisition != acq) continue;
                for (long r = begin; r < end; ++r) labels.push_back(stacked.row_meta[r].task);
                break;
            }
            io::write_trajectory(mean, labels, "comp_",
                                 (pca_dir / ("mean_trajectory_" + acq + ".tsv")).string());
        } catch (const std::exception& e) {
            log_info("embed-pca: skipping mean trajectory for acquisition %s: %s", acq.c_str(),
                     e.what());
        }
    }
    for (int c = 0; c < model.k; ++c)
        io::write_network(component_network(model, c, cfg.retain_fraction), model.node_labels,
                          (pca_dir / ("component_" + std::to_string(c + 1) + ".tsv")).string());
}

void run_embed_lda(const PipelineConfig& cfg) {
    cfg.validate();
    const Population pop = load_population(cfg);
    const auto estimates = load_estimates(cfg, pop);
    const StackedLaplacians stacked = stacked_from_estimates(cfg, pop, estimates);
    const ContrastSpec contrast{cfg.contrast_positive, cfg.contrast_negative};

    const fs::path lda_dir = fs::path(cfg.output_dir) / "lda";
    fs::create_directories(lda_dir);

    const ContrastRows train =
        contrast_rows_by_subject(stacked, contrast, cfg.train_acquisition);
    if (train.rows.empty())
        throw std::runtime_error("no training rows carry the contrast labels '" +
                                 contrast.positive_label + "'/'" + contrast.negative_label +
                                 "' in acquisition '" + cfg.train_acquisition + "'");

    const int n_subjects = static_cast<int>(train.rows.size());
    std::vector<std::vector<int>> selected_sets(n_subjects);
    std::vector<std::string> errors(n_subjects);
#pragma omp parallel for schedule(dynamic) num_threads(cfg.workers) if (cfg.workers > 1)
    for (int s = 0; s < n_subjects; ++s) {
        try {
            const std::vector<double> grid =
                cfg.lda_lambda_grid.empty() ? make_lambda_grid(train.rows[s], train.labels[s])
                                            : cfg.lda_lambda_grid;
            selected_sets[s] =
                sparse_lda_subject(train.rows[s], train.labels[s], grid, cfg.cv_folds);
        } catch (const std::exception& e) {
            errors[s] = e.what();
        }
    }
    for (int s = 0; s < n_subjects; ++s)
        if (!errors[s].empty())
            throw std::runtime_error("screening failed for subject " + train.subject_ids[s] +
                                     ": " + errors[s]);

    const ScreenResult screen =
        stability_screen(selected_sets, stacked.edge_index.n_edges(), cfg.tau);
    io::write_screen_result(screen, stacked.edge_index, stacked.node_labels,
                            (lda_dir / "screen.tsv").string());
    log_info("embed-lda: %d subjects screened, p_prime=%d at tau=%g", n_subjects, screen.p_prime,
             cfg.tau);
    if (screen.p_prime == 0) {
        log_info("embed-lda: no edges survived screening; skipping model fit");
        return;
    }

    // Pooled training rows across subjects.
    long total_rows = 0;
    for (const auto& r : train.rows) total_rows += r.rows();
    Matrix pooled(total_rows, stacked.matrix.cols());
    std::vector<int> pooled_labels(total_rows);
    long row = 0;
    for (std::size_t s = 0; s < train.rows.size(); ++s)
        for (long i = 0; i < train.rows[s].rows(); ++i, ++row) {
            pooled.row(row) = train.rows[s].row(i);
            pooled_labels[row] = train.labels[s][i];
        }

    const LdaModel model =
        fit_lda(pooled, pooled_labels, screen.selected_edges, contrast, cfg.shrinkage);
    io::write_lda_model(model, stacked.edge_index, stacked.node_labels,
                        (lda_dir / "model.tsv").string());
    io::write_network(lda_network(model, stacked.edge_index), stacked.node_labels,
                      (lda_dir / "network.tsv").string());

    // Held-out validation on the unseen acquisition.
    const auto blocks = session_blocks(stacked);
    std::vector<Matrix> val_rows;
    std::vector<std::vector<std::string>> val_labels;
    for (const auto& [begin, end] : blocks) {
        const auto& meta = stacked.row_meta[begin];
        if (meta.acquisition != cfg.validation_acquisition) continue;
        val_rows.push_back(stacked.matrix.middleRows(begin, end - begin));
        std::vector<std::string> labels;
        for (long r = begin; r < end; ++r) labels.push_back(stacked.row_meta[r].task);
        const Vector traj = project_lda(model, val_rows.back());
        io::write_trajectory(traj.transpose(), labels, "lda_",
                             (lda_dir / ("trajectory_" + meta.subject_id + "_" +
                                         meta.acquisition + ".tsv"))
                                 .string());
        val_labels.push_back(std::move(labels));
    }
    if (val_rows.empty()) {
        log_info("embed-lda: no sessions in validation acquisition '%s'; skipping validation",
                 cfg.validation_acquisition.c_str());
        return;
    }
    const HeldoutReport report = evaluate_heldout(model, val_rows, val_labels, contrast);
    io::write_trajectory(report.mean_trajectory.transpose(), val_labels.front(), "lda_",
                         (lda_dir / "mean_trajectory_validation.tsv").string());
    std::ofstream summary(lda_dir / "summary.tsv");
    summary << "metric\tvalue\n"
            << "p_prime\t" << screen.p_prime << "\n"
            << "accuracy\t" << io::fmt(report.accuracy) << "\n"
            << "task_correlation\t" << io::fmt(report.task_correlation) << "\n"
            << "contrast_points\t" << report.n_contrast_points << "\n";
    log_info("embed-lda: held-out accuracy=%.4f correlation=%.4f", report.accuracy,
             report.task_correlation);
}

void run_evaluate(const PipelineConfig& cfg) {
    cfg.validate();
    const std::string truth_path = (fs::path(cfg.output_dir) / "truth.tsv").string();
    if (!fs::exists(truth_path))
        throw std::runtime_error("no ground truth at " + truth_path +
                                 " (evaluate requires a simulated dataset)");
    const GroundTruth truth = io::read_ground_truth(truth_path);
    const Population pop = load_population(cfg);
    const auto estimates = load_estimates(cfg, pop);

    nlohmann::json sessions = nlohmann::json::array();
    double f1_sum = 0.0;
    int scored = 0, within = 0;
    for (std::size_t s = 0; s < pop.sessions.size(); ++s) {
        const auto& session = pop.sessions[s];
        if (session.acquisition != cfg.train_acquisition) continue;  // truth uses this design
        const RecoveryScore score = score_recovery(estimates[s], truth);
        sessions.push_back({{"subject_id", session.subject_id},
                            {"acquisition", session.acquisition},
                            {"mean_f1", score.mean_f1},
                            {"estimated_change_points", score.estimated_change_points},
                            {"true_change_points", score.true_change_points},
                            {"change_point_count_error", score.change_point_count_error},
                            {"mean_change_point_distance", score.mean_change_point_distance}});
        f1_sum += score.mean_f1;
        within += std::abs(score.change_point_count_error) <= 2;
        ++scored;
    }
    if (scored == 0)
        throw std::runtime_error("no sessions in acquisition '" + cfg.train_acquisition +
                                 "' to evaluate");

    nlohmann::json summary = {
        {"sessions", sessions},
        {"mean_f1", f1_sum / scored},
        {"sessions_scored", scored},
        {"sessions_within_2_change_points", within},
    };
    const std::string lda_summary = (fs::path(cfg.output_dir) / "lda" / "summary.tsv").string();
    if (fs::exists(lda_summary)) {
        std::ifstream in(lda_summary);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            const auto tab = line.find('\t');
            if (tab != std::string::npos)
                summary["lda"][line.substr(0, tab)] = std::stod(line.substr(tab + 1));
        }
    }
    std::ofstream out(fs::path(cfg.output_dir) / "evaluation.json");
    out << summary.dump(2) << "\n";
    log_info("evaluate: mean_f1=%.4f over %d sessions", f1_sum / scored, scored);
}

void run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    if (cfg.manifest.empty()) run_simulate(cfg);
    run_estimate(cfg);
    run_embed_pca(cfg);
    run_embed_lda(cfg);
    if (fs::exists(fs::path(cfg.output_dir) / "truth.tsv")) run_evaluate(cfg);
}

}  // namespace dyncon
