#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavrl/env.hpp"
#include "uavrl/nn.hpp"
#include "uavrl/rl.hpp"

namespace uavrl {

// First-order MAML over DQN tasks. A task is one MDP instance (trade-off
// weight lambda + device layout); the meta-learner maintains a shared
// initialization theta that adapts to any task in few episodes.

// Raised when a code path would train a single task past its episode budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TaskRole { MetaTrain, MetaTest };

struct Task {
    double lambda_tradeoff = 0.0;
    std::uint64_t layout_seed = 0;
    TaskRole role = TaskRole::MetaTrain;

    bool operator==(const Task&) const = default;
};

struct TaskFamily {
    std::vector<Task> train;
    std::vector<Task> test;
};

enum class MetaOptimizer { Adam, Sgd };

struct MetaConfig {
    double alpha = 1e-4;       // inner (adaptation) learning rate
    double beta = 1e-4;        // meta learning rate
    int epochs = 500;
    int task_batch_size = 6;
    int inner_episodes = 50;   // E, support episodes per task
    int eval_episodes = 5;     // query/greedy-evaluation episodes
    int e_max = 100;           // per-task episode budget
    int shots = 30;            // default meta-test fine-tuning budget
    std::uint64_t seed = 0;
    MetaOptimizer meta_optimizer = MetaOptimizer::Adam;

    void validate() const;
};

struct MetaState {
    ParamVector theta;
    AdamState meta_adam;
    long epoch = 0;
    std::vector<double> meta_loss_history;
};

// Everything needed to expand a Task into a concrete learning problem.
// base_env supplies the shared grid/channel settings and the device count;
// each task overrides the trade-off weight and regenerates the layout.
struct MetaContext {
    EnvConfig base_env;
    DqnHyperparams dqn;              // inner-loop DQN settings (lr is alpha)
    std::vector<int> hidden = {256, 256};
    MetaConfig meta;

    MlpArchitecture arch() const {
        return MlpArchitecture::q_network(feature_count(base_env), base_env.action_count(),
                                          hidden);
    }
    void validate() const;
};

// Training lambdas evenly spaced over [lambda_lo, lambda_hi]; test lambdas on
// the half-offset grid between/past them, so the two sets never coincide.
// Layout seeds are derived per task index. Deterministic per seed.
TaskFamily make_task_family(int n_train, int n_test, double lambda_lo, double lambda_hi,
                            std::uint64_t seed);

EnvConfig make_env(const EnvConfig& base, const Task& task);

// Seed for a task's inner run, derived from the task's content (not its batch
// position) so identical tasks produce identical adaptations under any
// execution order.
std::uint64_t task_seed(const Task& task, std::uint64_t step_seed);

struct InnerAdaptResult {
    ParamVector theta_prime;
    std::vector<EpisodeMetrics> support_metrics;
};

// Clones theta into a fresh agent (fresh replay buffer and optimizer) and
// runs inner_episodes of DQN at learning rate alpha. theta is not mutated.
// Throws BudgetError when inner_episodes exceeds e_max.
InnerAdaptResult inner_adapt(const MetaContext& ctx, const ParamVector& theta, const Task& task,
                             std::uint64_t seed);

struct QueryLoss {
    double loss = 0.0;
    ParamVector grad;
};

// Fills a fresh buffer with eval_episodes of greedy interaction under
// theta_prime, then returns the TD loss and its gradient at theta_prime
// (first-order: the inner trajectory is not differentiated through).
QueryLoss query_loss(const MetaContext& ctx, const ParamVector& theta_prime, const Task& task,
                     std::uint64_t seed);

struct MetaEpochMetrics {
    long epoch = 0;
    double meta_loss = 0.0;
    // Averages over all support episodes in the batch (0 when there are none).
    double mean_support_reward = 0.0;
    double mean_aoi = 0.0;
    double mean_power_w = 0.0;
    double mean_epsilon = 0.0;
};

struct MetaStepResult {
    MetaState state;
    MetaEpochMetrics metrics;
};

// One outer update: per task in fixed order, inner_adapt then query_loss;
// meta-loss and meta-gradient are the sums over the batch; theta moves one
// optimizer step with rate beta.
MetaStepResult meta_step(const MetaContext& ctx, MetaState state, const std::vector<Task>& batch,
                         std::uint64_t seed);

// Full meta-training loop: epochs x (sample task_batch_size training tasks
// without replacement, meta_step). Deterministic per seed.
std::pair<MetaState, std::vector<MetaEpochMetrics>> meta_train(const MetaContext& ctx,
                                                               const std::vector<Task>& tasks,
                                                               std::uint64_t seed);

// Few-shot adaptation curve: entry k holds the greedy evaluation of theta
// after k fine-tuning episodes (entry 0 is zero-shot), so the curve has
// shots+1 entries. Every evaluation reuses the same seed, giving paired start
// states across k. theta is not mutated. Throws BudgetError when shots
// exceeds e_max.
std::vector<EvalResult> meta_test(const MetaContext& ctx, const ParamVector& theta,
                                  const Task& task, int shots, std::uint64_t seed);

}  // namespace uavrl
