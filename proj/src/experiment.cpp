#include "uavrl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "uavrl/baselines.hpp"
#include "uavrl/checkpoint.hpp"
#include "uavrl/meta.hpp"
#include "uavrl/metrics.hpp"
#include "uavrl/plots.hpp"
#include "uavrl/rng.hpp"
#include "uavrl/version.hpp"

namespace uavrl {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Fixed seed streams so every mode's randomness is derived from cfg.seed.
constexpr std::uint64_t kSeedAgentInit = 1;
constexpr std::uint64_t kSeedTrain = 2;
constexpr std::uint64_t kSeedEval = 3;
constexpr std::uint64_t kSeedTheta = 4;
constexpr std::uint64_t kSeedMetaTestBase = 100;
constexpr std::uint64_t kSeedSweepBase = 200;

constexpr double kSweepViTolerance = 1e-6;

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed_s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

void write_manifest(const ExperimentConfig& cfg, const fs::path& dir) {
    ordered_json manifest;
    manifest["config"] = ordered_json::parse(config_to_text(cfg));
    manifest["seed"] = cfg.seed;
    manifest["code_version"] = kCodeVersion;
    manifest["timestamp"] = iso_timestamp();

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error("experiment: cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
}

void write_sidecar(const fs::path& path, const MlpArchitecture& arch,
                   const ExperimentConfig& cfg) {
    ordered_json j;
    j["layer_sizes"] = arch.layer_sizes;
    j["gamma"] = cfg.dqn.gamma;
    j["lr"] = cfg.dqn.lr;
    j["alpha"] = cfg.meta.alpha;
    j["beta"] = cfg.meta.beta;
    j["batch_size"] = cfg.dqn.batch_size;
    j["target_update_interval"] = cfg.dqn.target_update_interval;
    j["buffer_capacity"] = cfg.dqn.buffer_capacity;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("experiment: cannot write sidecar " + path.string());
    out << j.dump(2) << "\n";
}

ParamVector load_theta(const ExperimentConfig& cfg, const MlpArchitecture& expected) {
    if (cfg.checkpoint.empty())  // random-initialization baseline
        return init_params(expected, derive_seed(cfg.seed, kSeedTheta));
    Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
    if (!(ckpt.arch == expected))
        throw std::runtime_error("experiment: checkpoint architecture does not match config");
    return std::move(ckpt.params);
}

std::vector<fs::path> run_train_dqn(const ExperimentConfig& cfg, const fs::path& dir) {
    const Stopwatch clock;
    DqnAgent agent = make_agent(cfg.env, cfg.dqn, cfg.hidden, derive_seed(cfg.seed, kSeedAgentInit));
    TrainOptions opts;
    opts.episodes = cfg.episodes;
    const auto history = train_dqn(cfg.env, agent, opts, derive_seed(cfg.seed, kSeedTrain));

    MetricsWriter writer(dir / "dqn_train.csv");
    for (const EpisodeMetrics& m : history) {
        MetricsRecord r;
        r.run_id = cfg.run_id;
        r.phase = "train";
        r.index = m.episode;
        r.reward = m.total_reward;
        r.mean_aoi = m.mean_aoi;
        r.mean_power_w = m.mean_power_w;
        r.epsilon = m.epsilon;
        r.wall_time_s = clock.elapsed_s();
        writer.write(r);
    }
    save_checkpoint(dir / "dqn_final.ckpt", agent.arch, agent.online_params);
    write_sidecar(dir / "dqn_final.json", agent.arch, cfg);
    return {dir / "dqn_train.csv", dir / "dqn_final.ckpt", dir / "dqn_final.json"};
}

std::vector<fs::path> run_meta_train(const ExperimentConfig& cfg, const fs::path& dir) {
    const Stopwatch clock;
    const TaskFamily family = resolve_task_family(cfg);
    const MetaContext ctx = cfg.meta_context();
    auto [state, history] = meta_train(ctx, family.train, cfg.seed);

    MetricsWriter writer(dir / "meta_loss.csv");
    for (const MetaEpochMetrics& m : history) {
        MetricsRecord r;
        r.run_id = cfg.run_id;
        r.phase = "meta-train";
        r.index = m.epoch;
        r.reward = m.mean_support_reward;
        r.mean_aoi = m.mean_aoi;
        r.mean_power_w = m.mean_power_w;
        r.meta_loss = m.meta_loss;
        r.epsilon = m.mean_epsilon;
        r.wall_time_s = clock.elapsed_s();
        writer.write(r);
    }
    save_checkpoint(dir / "meta_theta.ckpt", ctx.arch(), state.theta);
    write_sidecar(dir / "meta_theta.json", ctx.arch(), cfg);
    save_task_file(family, dir / "tasks.json");
    return {dir / "meta_loss.csv", dir / "meta_theta.ckpt", dir / "meta_theta.json",
            dir / "tasks.json"};
}

std::vector<fs::path> run_meta_test(const ExperimentConfig& cfg, const fs::path& dir) {
    const Stopwatch clock;
    const TaskFamily family = resolve_task_family(cfg);
    if (family.test.empty())
        throw std::runtime_error("experiment: meta-test needs at least one test task");
    const MetaContext ctx = cfg.meta_context();
    const ParamVector theta = load_theta(cfg, ctx.arch());

    MetricsWriter writer(dir / "adaptation.csv");
    for (std::size_t ti = 0; ti < family.test.size(); ++ti) {
        const auto curve = meta_test(ctx, theta, family.test[ti], ctx.meta.shots,
                                     derive_seed(cfg.seed, kSeedMetaTestBase + ti));
        for (std::size_t k = 0; k < curve.size(); ++k) {
            MetricsRecord r;
            r.run_id = cfg.run_id + "-t" + std::to_string(ti);
            r.phase = "adapt";
            r.index = static_cast<long>(k);
            r.reward = curve[k].mean_episode_reward;
            r.mean_aoi = curve[k].mean_aoi;
            r.mean_power_w = curve[k].mean_power_w;
            r.wall_time_s = clock.elapsed_s();
            writer.write(r);
        }
    }
    save_task_file(family, dir / "tasks.json");
    return {dir / "adaptation.csv", dir / "tasks.json"};
}

std::vector<fs::path> run_eval(const ExperimentConfig& cfg, const fs::path& dir) {
    const Stopwatch clock;
    PolicyFn policy;
    if (cfg.policy == "checkpoint") {
        Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
        if (ckpt.arch.input_size() != feature_count(cfg.env) ||
            ckpt.arch.output_size() != cfg.env.action_count())
            throw std::runtime_error("experiment: checkpoint does not fit this environment");
        policy = greedy_policy(ckpt.arch, std::move(ckpt.params));
    } else if (cfg.policy == "round-robin") {
        policy = baseline_policy(BaselineKind::RoundRobin, cfg.env);
    } else if (cfg.policy == "max-age-first") {
        policy = baseline_policy(BaselineKind::MaxAgeFirst, cfg.env);
    } else {
        policy = baseline_policy(BaselineKind::Random, cfg.env);
    }

    const EvalResult res = rollout_policy(cfg.env, policy, cfg.eval_episodes,
                                          derive_seed(cfg.seed, kSeedEval), cfg.dqn.gamma);
    MetricsWriter writer(dir / "eval.csv");
    MetricsRecord r;
    r.run_id = cfg.run_id;
    r.phase = "eval";
    r.index = 0;
    r.reward = res.mean_episode_reward;
    r.mean_aoi = res.mean_aoi;
    r.mean_power_w = res.mean_power_w;
    r.wall_time_s = clock.elapsed_s();
    writer.write(r);
    return {dir / "eval.csv"};
}

std::vector<fs::path> run_sweep(const ExperimentConfig& cfg, const fs::path& dir) {
    const Stopwatch clock;
    TaskFamily family = resolve_task_family(cfg);
    if (family.test.empty())
        throw std::runtime_error("experiment: sweep needs at least one test task");
    std::stable_sort(family.test.begin(), family.test.end(),
                     [](const Task& a, const Task& b) { return a.lambda_tradeoff < b.lambda_tradeoff; });

    MetricsWriter writer(dir / "sweep.csv");
    for (std::size_t j = 0; j < family.test.size(); ++j) {
        const EnvConfig env = make_env(cfg.env, family.test[j]);
        PolicyFn policy;
        if (cfg.sweep.policy == "vi") {
            policy = table_policy(value_iteration(env, cfg.dqn.gamma, kSweepViTolerance));
        } else {
            DqnAgent agent = make_agent(env, cfg.dqn, cfg.hidden,
                                        derive_seed(cfg.seed, kSeedSweepBase + 2 * j));
            train_dqn(env, agent, cfg.sweep.train_episodes, 0,
                      derive_seed(cfg.seed, kSeedSweepBase + 2 * j + 1));
            policy = greedy_policy(agent.arch, agent.online_params);
        }
        const EvalResult res = rollout_policy(env, policy, cfg.sweep.eval_episodes,
                                              derive_seed(cfg.seed, kSeedEval), cfg.dqn.gamma);
        MetricsRecord r;
        r.run_id = cfg.run_id;
        r.phase = "sweep";
        r.index = static_cast<long>(j);
        r.reward = res.mean_step_reward;
        r.mean_aoi = res.mean_aoi;
        r.mean_power_w = res.mean_power_w;
        r.wall_time_s = clock.elapsed_s();
        writer.write(r);
    }
    save_task_file(family, dir / "tasks.json");
    return {dir / "sweep.csv", dir / "tasks.json"};
}

}  // namespace

std::vector<fs::path> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    std::vector<fs::path> artifacts;
    switch (cfg.mode) {
        case RunMode::TrainDqn: artifacts = run_train_dqn(cfg, dir); break;
        case RunMode::MetaTrain: artifacts = run_meta_train(cfg, dir); break;
        case RunMode::MetaTest: artifacts = run_meta_test(cfg, dir); break;
        case RunMode::Eval: artifacts = run_eval(cfg, dir); break;
        case RunMode::Sweep: artifacts = run_sweep(cfg, dir); break;
    }
    write_manifest(cfg, dir);
    artifacts.push_back(dir / "manifest.json");
    return artifacts;
}

}  // namespace uavrl
