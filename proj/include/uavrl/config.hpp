#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavrl/env.hpp"
#include "uavrl/meta.hpp"
#include "uavrl/rl.hpp"

namespace uavrl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { TrainDqn, MetaTrain, MetaTest, Eval, Sweep };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);

// Task family source: an explicit file, or generator parameters.
struct TasksSpec {
    std::string file;  // when non-empty the family is loaded from this JSON file
    int n_train = 10;
    int n_test = 11;
    double lambda_lo = 0.0;
    double lambda_hi = 450.0;
    std::uint64_t family_seed = 0;
};

struct SweepConfig {
    std::string policy = "vi";  // "vi" (exact per-task optimum) or "dqn" (trained per task)
    int train_episodes = 300;   // per-task DQN episodes when policy == "dqn"
    int eval_episodes = 20;
};

// One experiment = one JSON file. Unset fields take the defaults below (the
// published parameter set); unknown keys are rejected. Loading resolves
// device positions, so a saved config is fully explicit.
struct ExperimentConfig {
    RunMode mode = RunMode::TrainDqn;
    std::string run_id = "run";
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    int episodes = 500;                 // train-dqn episodes
    int eval_episodes = 20;             // eval-mode rollouts
    std::string policy = "checkpoint";  // eval source: checkpoint|round-robin|max-age-first|random
    std::string checkpoint;             // theta input for eval / meta-test
    std::vector<int> hidden = {256, 256};
    EnvConfig env;
    DqnHyperparams dqn;
    MetaConfig meta;
    TasksSpec tasks;
    SweepConfig sweep;

    MetaContext meta_context() const;
    void validate() const;  // throws ConfigError
};

ExperimentConfig parse_config_text(const std::string& json_text, const std::string& source_name);
ExperimentConfig load_config(const std::filesystem::path& path);
// Normalized JSON (fixed key order, resolved positions); load(save(x)) == x.
std::string config_to_text(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

// Task family files: a JSON list of {lambda, layout_seed, role} objects.
TaskFamily load_task_file(const std::filesystem::path& path);
void save_task_file(const TaskFamily& family, const std::filesystem::path& path);
// From cfg.tasks: loads the file when given, otherwise generates the family.
TaskFamily resolve_task_family(const ExperimentConfig& cfg);

}  // namespace uavrl
