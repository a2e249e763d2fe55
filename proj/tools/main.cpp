#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uavrl/config.hpp"
#include "uavrl/experiment.hpp"
#include "uavrl/plots.hpp"
#include "uavrl/version.hpp"

namespace {

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> run_id;
    std::optional<std::string> checkpoint;
    bool desk_scale = false;
    bool paper_scale = false;
};

void add_run_options(CLI::App* sub, RunOptions& o) {
    sub->add_option("--config", o.config_path, "JSON experiment config")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the run seed");
    sub->add_option("--out", o.out_dir, "Override the output directory");
    sub->add_option("--run-id", o.run_id, "Override the run id");
    sub->add_option("--checkpoint", o.checkpoint, "Parameter checkpoint to start from");
    auto* desk = sub->add_flag("--desk-scale", o.desk_scale,
                               "Small preset: 5x5 grid, 2 devices, short runs");
    sub->add_flag("--paper-scale", o.paper_scale,
                  "Full preset: 10x10 grid, 5 devices, published hyperparameters")
        ->excludes(desk);
}

void apply_desk_preset(uavrl::ExperimentConfig& cfg) {
    cfg.env.side_length_m = 500.0;
    cfg.env.cells_per_side = 5;
    cfg.env.a_max = 10;
    cfg.env.horizon = 40;
    cfg.env.device_positions = uavrl::generate_device_positions(cfg.env.side_length_m, 2, 1);
    cfg.hidden = {32, 32};
    cfg.dqn.batch_size = 32;
    cfg.dqn.buffer_capacity = 20000;
    cfg.episodes = 300;
    cfg.meta.epochs = 30;
    cfg.meta.task_batch_size = 2;
    cfg.meta.inner_episodes = 5;
    cfg.meta.eval_episodes = 2;
    cfg.meta.shots = 30;
    cfg.tasks.n_train = 4;
    cfg.tasks.n_test = 11;
}

void apply_paper_preset(uavrl::ExperimentConfig& cfg) {
    cfg.env.side_length_m = 1000.0;
    cfg.env.cells_per_side = 10;
    cfg.env.a_max = 30;
    cfg.env.horizon = 100;
    cfg.env.device_positions = uavrl::generate_device_positions(cfg.env.side_length_m, 5, 1);
    cfg.hidden = {256, 256};
    cfg.dqn.batch_size = 64;
    cfg.dqn.buffer_capacity = 100000;
    cfg.episodes = 500;
    cfg.meta.epochs = 500;
    cfg.meta.task_batch_size = 6;
    cfg.meta.inner_episodes = 50;
    cfg.meta.eval_episodes = 5;
    cfg.meta.shots = 100;
    cfg.tasks.n_train = 10;
    cfg.tasks.n_test = 11;
}

int run(const std::string& mode_name, const RunOptions& o) {
    uavrl::ExperimentConfig cfg = o.config_path.empty()
                                      ? uavrl::parse_config_text("{}", "<defaults>")
                                      : uavrl::load_config(o.config_path);
    if (o.paper_scale) apply_paper_preset(cfg);
    if (o.desk_scale) apply_desk_preset(cfg);
    cfg.mode = uavrl::run_mode_from_string(mode_name);
    if (o.seed) cfg.seed = *o.seed;
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.run_id) cfg.run_id = *o.run_id;
    if (o.checkpoint) cfg.checkpoint = *o.checkpoint;

    for (const auto& path : uavrl::run_experiment(cfg)) std::cout << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV data-collection RL: DQN per task, MAML across tasks"};
    app.set_version_flag("--version", uavrl::kCodeVersion);
    app.require_subcommand(1);

    RunOptions opts;
    for (const char* name : {"train-dqn", "meta-train", "meta-test", "eval", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_run_options(sub, opts);
    }

    std::vector<std::string> csv_paths;
    std::string plot_out = "plots";
    CLI::App* plot = app.add_subcommand("plot", "Render SVG plots from metrics CSVs");
    plot->add_option("--csv", csv_paths, "Metrics CSV inputs")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "Directory for the SVGs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad flags are configuration errors
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        if (sub->get_name() == "plot") {
            std::vector<std::filesystem::path> inputs(csv_paths.begin(), csv_paths.end());
            for (const auto& path : uavrl::emit_plots(inputs, plot_out))
                std::cout << path.string() << "\n";
            return 0;
        }
        return run(sub->get_name(), opts);
    } catch (const uavrl::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
