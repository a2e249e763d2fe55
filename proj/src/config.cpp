#include "uavrl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace uavrl {

using ordered_json = nlohmann::ordered_json;

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::TrainDqn: return "train-dqn";
        case RunMode::MetaTrain: return "meta-train";
        case RunMode::MetaTest: return "meta-test";
        case RunMode::Eval: return "eval";
        case RunMode::Sweep: return "sweep";
    }
    throw std::logic_error("config: unreachable mode");
}

RunMode run_mode_from_string(const std::string& text) {
    if (text == "train-dqn") return RunMode::TrainDqn;
    if (text == "meta-train") return RunMode::MetaTrain;
    if (text == "meta-test") return RunMode::MetaTest;
    if (text == "eval") return RunMode::Eval;
    if (text == "sweep") return RunMode::Sweep;
    throw ConfigError("config: unknown mode '" + text + "'");
}

namespace {

// Tracks which keys a section consumed so leftovers can be reported by name.
class Section {
public:
    Section(const ordered_json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError("config: " + path_ + " must be a JSON object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        allowed_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end()) return;
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config: bad value for " + path_ + key + ": " + e.what());
        }
    }

    bool has(const char* key) {
        allowed_.insert(key);
        return obj_.contains(key);
    }

    const ordered_json* sub(const char* key) {
        allowed_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items())
            if (!allowed_.contains(key))
                throw ConfigError("config: unknown key " + path_ + key);
    }

private:
    const ordered_json& obj_;
    std::string path_;
    std::set<std::string> allowed_;
};

void parse_env(const ordered_json& j, EnvConfig& env) {
    Section s(j, "env.");
    s.read("side_length_m", env.side_length_m);
    s.read("cells_per_side", env.cells_per_side);
    s.read("uav_altitude_m", env.uav_altitude_m);
    s.read("g0_db", env.g0_db);
    s.read("bandwidth_hz", env.bandwidth_hz);
    s.read("packet_bits", env.packet_bits);
    s.read("noise_power_w", env.noise_power_w);
    s.read("a_max", env.a_max);
    s.read("omega", env.omega);
    s.read("omega_per_device", env.omega_per_device);
    s.read("lambda_tradeoff", env.lambda_tradeoff);
    s.read("horizon", env.horizon);

    int n_devices = 5;
    std::uint64_t layout_seed = 1;
    const bool has_positions = s.has("device_positions");
    const bool has_generator = s.has("n_devices") || s.has("layout_seed");
    if (has_positions && has_generator)
        throw ConfigError("config: env.device_positions conflicts with env.n_devices/layout_seed");
    if (has_positions) {
        s.read("device_positions", env.device_positions);
    } else {
        s.read("n_devices", n_devices);
        s.read("layout_seed", layout_seed);
        if (n_devices < 1) throw ConfigError("config: env.n_devices must be >= 1");
        env.device_positions = generate_device_positions(env.side_length_m, n_devices, layout_seed);
    }
    s.finish();
}

void parse_dqn(const ordered_json& j, DqnHyperparams& dqn) {
    Section s(j, "dqn.");
    s.read("gamma", dqn.gamma);
    s.read("lr", dqn.lr);
    s.read("batch_size", dqn.batch_size);
    s.read("target_update_interval", dqn.target_update_interval);
    s.read("epsilon_start", dqn.epsilon_start);
    s.read("epsilon_end", dqn.epsilon_end);
    s.read("epsilon_decay_fraction", dqn.epsilon_decay_fraction);
    s.read("buffer_capacity", dqn.buffer_capacity);
    s.read("terminal_bootstrap_mask", dqn.terminal_bootstrap_mask);
    s.finish();
}

void parse_meta(const ordered_json& j, MetaConfig& meta) {
    Section s(j, "meta.");
    s.read("alpha", meta.alpha);
    s.read("beta", meta.beta);
    s.read("epochs", meta.epochs);
    s.read("task_batch_size", meta.task_batch_size);
    s.read("inner_episodes", meta.inner_episodes);
    s.read("eval_episodes", meta.eval_episodes);
    s.read("e_max", meta.e_max);
    s.read("shots", meta.shots);
    s.read("seed", meta.seed);
    std::string optimizer =
        meta.meta_optimizer == MetaOptimizer::Adam ? std::string("adam") : std::string("sgd");
    s.read("meta_optimizer", optimizer);
    if (optimizer == "adam")
        meta.meta_optimizer = MetaOptimizer::Adam;
    else if (optimizer == "sgd")
        meta.meta_optimizer = MetaOptimizer::Sgd;
    else
        throw ConfigError("config: meta.meta_optimizer must be 'adam' or 'sgd'");
    s.finish();
}

void parse_tasks(const ordered_json& j, TasksSpec& tasks) {
    if (j.is_string()) {
        tasks.file = j.get<std::string>();
        if (tasks.file.empty()) throw ConfigError("config: tasks file path must not be empty");
        return;
    }
    Section s(j, "tasks.");
    s.read("n_train", tasks.n_train);
    s.read("n_test", tasks.n_test);
    s.read("lambda_lo", tasks.lambda_lo);
    s.read("lambda_hi", tasks.lambda_hi);
    s.read("family_seed", tasks.family_seed);
    s.finish();
}

void parse_sweep(const ordered_json& j, SweepConfig& sweep) {
    Section s(j, "sweep.");
    s.read("policy", sweep.policy);
    s.read("train_episodes", sweep.train_episodes);
    s.read("eval_episodes", sweep.eval_episodes);
    s.finish();
}

TaskRole role_from_string(const std::string& text) {
    if (text == "meta-train") return TaskRole::MetaTrain;
    if (text == "meta-test") return TaskRole::MetaTest;
    throw ConfigError("config: unknown task role '" + text + "'");
}

}  // namespace

MetaContext ExperimentConfig::meta_context() const {
    MetaContext ctx;
    ctx.base_env = env;
    ctx.dqn = dqn;
    ctx.hidden = hidden;
    ctx.meta = meta;
    return ctx;
}

void ExperimentConfig::validate() const {
    try {
        env.validate();
        dqn.validate();
        meta.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (run_id.empty() || run_id.find(',') != std::string::npos ||
        run_id.find('\n') != std::string::npos)
        throw ConfigError("config: run_id must be non-empty and comma-free");
    if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
    if (episodes < 0) throw ConfigError("config: episodes must be >= 0");
    if (eval_episodes < 1) throw ConfigError("config: eval_episodes must be >= 1");
    for (int h : hidden)
        if (h < 1) throw ConfigError("config: hidden layer sizes must be >= 1");
    if (policy != "checkpoint" && policy != "round-robin" && policy != "max-age-first" &&
        policy != "random")
        throw ConfigError("config: policy must be checkpoint|round-robin|max-age-first|random");
    if (sweep.policy != "vi" && sweep.policy != "dqn")
        throw ConfigError("config: sweep.policy must be 'vi' or 'dqn'");
    if (sweep.train_episodes < 0) throw ConfigError("config: sweep.train_episodes must be >= 0");
    if (sweep.eval_episodes < 1) throw ConfigError("config: sweep.eval_episodes must be >= 1");
    if (tasks.file.empty()) {
        if (tasks.n_train < 1 || tasks.n_test < 1)
            throw ConfigError("config: tasks.n_train and tasks.n_test must be >= 1");
        if (!(tasks.lambda_lo >= 0) || !(tasks.lambda_hi >= tasks.lambda_lo))
            throw ConfigError("config: tasks lambda range must satisfy 0 <= lo <= hi");
    }
    if (mode == RunMode::Eval && policy == "checkpoint" && checkpoint.empty())
        throw ConfigError("config: eval with policy 'checkpoint' needs a checkpoint path");
}

ExperimentConfig parse_config_text(const std::string& json_text, const std::string& source_name) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: cannot parse " + source_name + ": " + e.what());
    }

    ExperimentConfig cfg;
    Section s(j, "");
    std::string mode = to_string(cfg.mode);
    s.read("mode", mode);
    cfg.mode = run_mode_from_string(mode);
    s.read("run_id", cfg.run_id);
    s.read("seed", cfg.seed);
    s.read("output_dir", cfg.output_dir);
    s.read("episodes", cfg.episodes);
    s.read("eval_episodes", cfg.eval_episodes);
    s.read("policy", cfg.policy);
    s.read("checkpoint", cfg.checkpoint);
    s.read("hidden", cfg.hidden);
    if (const ordered_json* sub = s.sub("env")) parse_env(*sub, cfg.env);
    if (!j.contains("env")) {
        // Still resolve the default layout so the config is explicit.
        cfg.env.device_positions = generate_device_positions(cfg.env.side_length_m, 5, 1);
    }
    if (const ordered_json* sub = s.sub("dqn")) parse_dqn(*sub, cfg.dqn);
    if (const ordered_json* sub = s.sub("meta")) parse_meta(*sub, cfg.meta);
    if (const ordered_json* sub = s.sub("tasks")) parse_tasks(*sub, cfg.tasks);
    if (const ordered_json* sub = s.sub("sweep")) parse_sweep(*sub, cfg.sweep);
    s.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

std::string config_to_text(const ExperimentConfig& cfg) {
    ordered_json j;
    j["mode"] = to_string(cfg.mode);
    j["run_id"] = cfg.run_id;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;
    j["episodes"] = cfg.episodes;
    j["eval_episodes"] = cfg.eval_episodes;
    j["policy"] = cfg.policy;
    j["checkpoint"] = cfg.checkpoint;
    j["hidden"] = cfg.hidden;

    ordered_json env;
    env["side_length_m"] = cfg.env.side_length_m;
    env["cells_per_side"] = cfg.env.cells_per_side;
    env["uav_altitude_m"] = cfg.env.uav_altitude_m;
    env["g0_db"] = cfg.env.g0_db;
    env["bandwidth_hz"] = cfg.env.bandwidth_hz;
    env["packet_bits"] = cfg.env.packet_bits;
    env["noise_power_w"] = cfg.env.noise_power_w;
    env["a_max"] = cfg.env.a_max;
    env["omega"] = cfg.env.omega;
    env["omega_per_device"] = cfg.env.omega_per_device;
    env["lambda_tradeoff"] = cfg.env.lambda_tradeoff;
    env["horizon"] = cfg.env.horizon;
    env["device_positions"] = cfg.env.device_positions;
    j["env"] = std::move(env);

    ordered_json dqn;
    dqn["gamma"] = cfg.dqn.gamma;
    dqn["lr"] = cfg.dqn.lr;
    dqn["batch_size"] = cfg.dqn.batch_size;
    dqn["target_update_interval"] = cfg.dqn.target_update_interval;
    dqn["epsilon_start"] = cfg.dqn.epsilon_start;
    dqn["epsilon_end"] = cfg.dqn.epsilon_end;
    dqn["epsilon_decay_fraction"] = cfg.dqn.epsilon_decay_fraction;
    dqn["buffer_capacity"] = cfg.dqn.buffer_capacity;
    dqn["terminal_bootstrap_mask"] = cfg.dqn.terminal_bootstrap_mask;
    j["dqn"] = std::move(dqn);

    ordered_json meta;
    meta["alpha"] = cfg.meta.alpha;
    meta["beta"] = cfg.meta.beta;
    meta["epochs"] = cfg.meta.epochs;
    meta["task_batch_size"] = cfg.meta.task_batch_size;
    meta["inner_episodes"] = cfg.meta.inner_episodes;
    meta["eval_episodes"] = cfg.meta.eval_episodes;
    meta["e_max"] = cfg.meta.e_max;
    meta["shots"] = cfg.meta.shots;
    meta["seed"] = cfg.meta.seed;
    meta["meta_optimizer"] = cfg.meta.meta_optimizer == MetaOptimizer::Adam ? "adam" : "sgd";
    j["meta"] = std::move(meta);

    if (!cfg.tasks.file.empty()) {
        j["tasks"] = cfg.tasks.file;
    } else {
        ordered_json tasks;
        tasks["n_train"] = cfg.tasks.n_train;
        tasks["n_test"] = cfg.tasks.n_test;
        tasks["lambda_lo"] = cfg.tasks.lambda_lo;
        tasks["lambda_hi"] = cfg.tasks.lambda_hi;
        tasks["family_seed"] = cfg.tasks.family_seed;
        j["tasks"] = std::move(tasks);
    }

    ordered_json sweep;
    sweep["policy"] = cfg.sweep.policy;
    sweep["train_episodes"] = cfg.sweep.train_episodes;
    sweep["eval_episodes"] = cfg.sweep.eval_episodes;
    j["sweep"] = std::move(sweep);

    return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("config: cannot open for writing: " + path.string());
    out << config_to_text(cfg);
    if (!out) throw std::runtime_error("config: write failed: " + path.string());
}

TaskFamily load_task_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open task file " + path.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: cannot parse task file " + path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw ConfigError("config: task file must hold a JSON list");

    TaskFamily family;
    for (std::size_t i = 0; i < j.size(); ++i) {
        Section s(j[i], "tasks[" + std::to_string(i) + "].");
        Task t;
        std::string role = "meta-train";
        s.read("lambda", t.lambda_tradeoff);
        s.read("layout_seed", t.layout_seed);
        s.read("role", role);
        s.finish();
        t.role = role_from_string(role);
        if (!(t.lambda_tradeoff >= 0))
            throw ConfigError("config: tasks[" + std::to_string(i) + "].lambda must be >= 0");
        (t.role == TaskRole::MetaTrain ? family.train : family.test).push_back(t);
    }
    return family;
}

void save_task_file(const TaskFamily& family, const std::filesystem::path& path) {
    ordered_json j = ordered_json::array();
    const auto append = [&j](const Task& t) {
        ordered_json o;
        o["lambda"] = t.lambda_tradeoff;
        o["layout_seed"] = t.layout_seed;
        o["role"] = t.role == TaskRole::MetaTrain ? "meta-train" : "meta-test";
        j.push_back(std::move(o));
    };
    for (const Task& t : family.train) append(t);
    for (const Task& t : family.test) append(t);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("config: cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("config: write failed: " + path.string());
}

TaskFamily resolve_task_family(const ExperimentConfig& cfg) {
    if (!cfg.tasks.file.empty()) return load_task_file(cfg.tasks.file);
    return make_task_family(cfg.tasks.n_train, cfg.tasks.n_test, cfg.tasks.lambda_lo,
                            cfg.tasks.lambda_hi, cfg.tasks.family_seed);
}

}  // namespace uavrl
