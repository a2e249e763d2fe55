#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "uavrl/env.hpp"
#include "uavrl/nn.hpp"

namespace uavrl {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

// Bounded FIFO of transitions; sampling is uniform with replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    // Oldest-first access, for tests.
    const Transition& at(std::size_t i) const;
    std::vector<Transition> sample(std::size_t batch_size, std::mt19937_64& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // insertion slot once full
    std::vector<Transition> storage_;
};

struct DqnHyperparams {
    double gamma = 0.99;
    double lr = 1e-4;
    int batch_size = 64;
    int target_update_interval = 100;  // online updates between hard target copies
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.5;
    std::size_t buffer_capacity = 100000;
    // When false the Bellman target bootstraps past the horizon (time-unaware mode).
    bool terminal_bootstrap_mask = true;

    void validate() const;
};

struct DqnAgent {
    MlpArchitecture arch;
    ParamVector online_params;
    ParamVector target_params;
    AdamState adam;
    ReplayBuffer buffer;
    DqnHyperparams hp;
    std::mt19937_64 rng;
    long env_steps = 0;
    long updates_done = 0;
    long episodes_done = 0;

    DqnAgent(MlpArchitecture architecture, ParamVector initial_params, DqnHyperparams hyper);
};

DqnAgent make_agent(const EnvConfig& cfg, const DqnHyperparams& hp,
                    const std::vector<int>& hidden, std::uint64_t init_seed);

// Linear decay from epsilon_start to epsilon_end over the first
// epsilon_decay_fraction of episodes, then flat.
double epsilon_at(const DqnHyperparams& hp, long episode, long total_episodes);

// Epsilon-greedy over the online Q-values; greedy ties break to lowest index.
int select_action(const MlpArchitecture& arch, const ParamVector& params,
                  std::span<const double> state_features, double epsilon, int n_actions,
                  std::mt19937_64& rng);

struct TdLoss {
    double loss = 0.0;
    ParamVector grad;
};

// Mean squared TD error over the batch with targets from target_params:
// y = r (+ gamma max_a' Q(s', a'; target) unless terminal). The gradient is
// taken w.r.t. params only.
TdLoss td_loss(const MlpArchitecture& arch, const ParamVector& params,
               const ParamVector& target_params, const std::vector<Transition>& batch,
               double gamma, bool terminal_bootstrap_mask = true);

struct EpisodeMetrics {
    long episode = 0;
    double total_reward = 0.0;
    double mean_aoi = 0.0;
    double mean_power_w = 0.0;
    double epsilon = 0.0;
    double mean_td_loss = 0.0;  // 0 until the buffer is warm
};

struct TrainOptions {
    int episodes = 0;
    int horizon = 0;  // <= 0 keeps cfg.horizon
    // Epsilon schedule bookkeeping so training can be split across calls.
    long schedule_episode_offset = 0;
    long schedule_total = -1;  // < 0 means `episodes`
    bool use_sgd = false;      // plain-SGD updates instead of Adam
};

// One epsilon-greedy episode loop with one gradient update per environment
// step once the buffer holds a full batch; hard target copy every
// target_update_interval updates. Deterministic per (cfg, agent params, seed).
std::vector<EpisodeMetrics> train_dqn(const EnvConfig& cfg, DqnAgent& agent,
                                      const TrainOptions& opts, std::uint64_t seed);
std::vector<EpisodeMetrics> train_dqn(const EnvConfig& cfg, DqnAgent& agent, int episodes,
                                      int horizon, std::uint64_t seed);

// ---- policy evaluation ----------------------------------------------------

using PolicyFn = std::function<Action(const EnvConfig&, const EnvState&, std::mt19937_64&)>;

PolicyFn greedy_policy(const MlpArchitecture& arch, ParamVector params);

struct EvalResult {
    double mean_step_reward = 0.0;
    double mean_episode_reward = 0.0;
    double mean_aoi = 0.0;
    double mean_power_w = 0.0;
    double mean_return = 0.0;  // discounted, from the first step
    int episodes = 0;
};

EvalResult rollout_policy(const EnvConfig& cfg, const PolicyFn& policy, int episodes,
                          std::uint64_t seed, double gamma);
// Deterministic variant: one episode from each given start cell, ages at 1.
EvalResult rollout_policy_from_starts(const EnvConfig& cfg, const PolicyFn& policy,
                                      std::span<const GridCell> starts, double gamma);
std::vector<GridCell> all_cells(const EnvConfig& cfg);

// Greedy evaluation of a Q-network; no learning side effects.
EvalResult evaluate_policy(const EnvConfig& cfg, const MlpArchitecture& arch,
                           const ParamVector& params, int episodes, std::uint64_t seed,
                           double gamma);

// ---- small-instance oracles ------------------------------------------------

// Enumerates (cell, age vector) states for tabular methods. Throws
// std::length_error when the product exceeds max_states.
class StateIndexer {
public:
    StateIndexer(const EnvConfig& cfg, std::size_t max_states = 1000000);

    std::size_t total() const { return total_; }
    std::size_t encode(const EnvState& s) const;
    EnvState decode(std::size_t index) const;

private:
    int cells_;
    int a_max_;
    int devices_;
    std::size_t total_;
};

struct TabularHyperparams {
    double alpha = 0.1;
    double gamma = 0.99;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.5;
    bool terminal_bootstrap_mask = true;
};

struct QTable {
    StateIndexer indexer;
    std::vector<double> values;  // total() x action_count, row-major
    int n_actions = 0;

    double q(std::size_t state, int action) const { return values[state * n_actions + action]; }
    int greedy_action(std::size_t state) const;
};

QTable tabular_q_learning(const EnvConfig& cfg, const TabularHyperparams& hp, int episodes,
                          std::uint64_t seed);

struct ValueIterationResult {
    StateIndexer indexer;
    std::vector<double> values;
    std::vector<int> policy;  // greedy action index per state
    int iterations = 0;
};

// Exact Bellman optimality iteration for the deterministic MDP; stops when the
// sup-norm change drops below tol.
ValueIterationResult value_iteration(const EnvConfig& cfg, double gamma, double tol,
                                     int max_iterations = 1000000);

PolicyFn table_policy(const QTable& table);
PolicyFn table_policy(const ValueIterationResult& vi);

}  // namespace uavrl
