#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "dyncon/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Time-varying sparse network estimation and graph embedding"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_override;
    int workers = 0;
    long long seed = -1;

    const std::map<std::string, std::pair<std::string, std::function<void(const dyncon::PipelineConfig&)>>>
        commands = {
            {"simulate", {"Generate a synthetic two-task dataset", dyncon::run_simulate}},
            {"estimate", {"Estimate per-session precision sequences", dyncon::run_estimate}},
            {"embed-pca", {"Fit and apply the PCA-driven embedding", dyncon::run_embed_pca}},
            {"embed-lda", {"Screen, fit, and validate the LDA-driven embedding",
                           dyncon::run_embed_lda}},
            {"evaluate", {"Score estimates against the simulated ground truth",
                          dyncon::run_evaluate}},
            {"pipeline", {"Run all stages end to end", dyncon::run_pipeline}},
        };

    for (const auto& [name, cmd] : commands) {
        auto* sub = app.add_subcommand(name, cmd.first);
        sub->add_option("--config", config_path, "Pipeline config file")->required();
        sub->add_option("--workers", workers, "Parallel session workers");
        sub->add_option("--seed", seed, "Override the configured seed");
        sub->add_option("--output", output_override, "Override the configured output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        dyncon::PipelineConfig config = dyncon::parse_config(config_path);
        if (workers > 0) config.workers = workers;
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        if (!output_override.empty()) config.output_dir = output_override;
        config.validate();
        commands.at(app.get_subcommands().front()->get_name()).second(config);
    } catch (const dyncon::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
