#include "uavrl/meta.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uavrl/rng.hpp"

namespace uavrl {

void MetaConfig::validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("meta: alpha must be > 0");
    if (!(beta >= 0)) throw std::invalid_argument("meta: beta must be >= 0");
    if (epochs < 0) throw std::invalid_argument("meta: epochs must be >= 0");
    if (task_batch_size < 1) throw std::invalid_argument("meta: task_batch_size must be >= 1");
    if (inner_episodes < 0) throw std::invalid_argument("meta: inner_episodes must be >= 0");
    if (eval_episodes < 1) throw std::invalid_argument("meta: eval_episodes must be >= 1");
    if (e_max < 0) throw std::invalid_argument("meta: e_max must be >= 0");
    if (shots < 0) throw std::invalid_argument("meta: shots must be >= 0");
    if (inner_episodes > e_max)
        throw BudgetError("meta: inner_episodes exceeds the per-task budget e_max");
}

void MetaContext::validate() const {
    base_env.validate();
    dqn.validate();
    meta.validate();
    arch().validate();
}

TaskFamily make_task_family(int n_train, int n_test, double lambda_lo, double lambda_hi,
                            std::uint64_t seed) {
    if (n_train < 1 || n_test < 1)
        throw std::invalid_argument("meta: need at least one training and one test task");
    if (!(lambda_lo >= 0) || !(lambda_hi >= lambda_lo))
        throw std::invalid_argument("meta: lambda range must satisfy 0 <= lo <= hi");
    if (lambda_lo == lambda_hi && (n_train > 1 || n_test > 1))
        throw std::invalid_argument("meta: degenerate lambda range cannot hold multiple tasks");

    const double spacing = n_train > 1 ? (lambda_hi - lambda_lo) / (n_train - 1)
                                       : (lambda_hi > lambda_lo ? lambda_hi - lambda_lo : 1.0);
    TaskFamily family;
    family.train.reserve(n_train);
    for (int i = 0; i < n_train; ++i) {
        Task t;
        t.lambda_tradeoff = lambda_lo + spacing * i;
        t.layout_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
        t.role = TaskRole::MetaTrain;
        family.train.push_back(t);
    }
    // Test values sit on the half-offset grid, strictly between or just past
    // the training values, so the two sets are disjoint.
    family.test.reserve(n_test);
    for (int j = 0; j < n_test; ++j) {
        Task t;
        t.lambda_tradeoff = lambda_lo + spacing * (0.5 + j);
        t.layout_seed = derive_seed(seed, static_cast<std::uint64_t>(n_train + j));
        t.role = TaskRole::MetaTest;
        family.test.push_back(t);
    }
    return family;
}

EnvConfig make_env(const EnvConfig& base, const Task& task) {
    if (!(task.lambda_tradeoff >= 0)) throw std::invalid_argument("meta: task lambda must be >= 0");
    EnvConfig env = base;
    env.lambda_tradeoff = task.lambda_tradeoff;
    env.device_positions =
        generate_device_positions(base.side_length_m, base.device_count(), task.layout_seed);
    env.validate();
    return env;
}

std::uint64_t task_seed(const Task& task, std::uint64_t step_seed) {
    std::uint64_t h = splitmix64(std::bit_cast<std::uint64_t>(task.lambda_tradeoff));
    h = splitmix64(h ^ task.layout_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(task.role));
    return derive_seed(step_seed, h);
}

InnerAdaptResult inner_adapt(const MetaContext& ctx, const ParamVector& theta, const Task& task,
                             std::uint64_t seed) {
    if (ctx.meta.inner_episodes > ctx.meta.e_max)
        throw BudgetError("meta: inner_episodes exceeds the per-task budget e_max");
    const EnvConfig env = make_env(ctx.base_env, task);
    DqnHyperparams hp = ctx.dqn;
    hp.lr = ctx.meta.alpha;
    DqnAgent agent(ctx.arch(), theta, hp);

    TrainOptions opts;
    opts.episodes = ctx.meta.inner_episodes;
    InnerAdaptResult result;
    result.support_metrics = train_dqn(env, agent, opts, seed);
    result.theta_prime = std::move(agent.online_params);
    return result;
}

QueryLoss query_loss(const MetaContext& ctx, const ParamVector& theta_prime, const Task& task,
                     std::uint64_t seed) {
    const EnvConfig env = make_env(ctx.base_env, task);
    const MlpArchitecture arch = ctx.arch();
    auto rng = make_rng(seed);

    ReplayBuffer buffer(ctx.dqn.buffer_capacity);
    for (int e = 0; e < ctx.meta.eval_episodes; ++e) {
        EnvState state = reset(env, rng);
        std::vector<double> features = encode_state(env, state);
        for (int t = 0; t < env.horizon; ++t) {
            const int a = select_action(arch, theta_prime, features, 0.0, env.action_count(), rng);
            const StepOutcome out = step(env, state, Action::from_index(a));
            std::vector<double> next_features = encode_state(env, out.next_state);
            buffer.push({features, a, out.reward, next_features, out.done});
            state = out.next_state;
            features = std::move(next_features);
        }
    }

    const auto batch = buffer.sample(static_cast<std::size_t>(ctx.dqn.batch_size), rng);
    const TdLoss td = td_loss(arch, theta_prime, theta_prime, batch, ctx.dqn.gamma,
                              ctx.dqn.terminal_bootstrap_mask);
    return {td.loss, td.grad};
}

MetaStepResult meta_step(const MetaContext& ctx, MetaState state, const std::vector<Task>& batch,
                         std::uint64_t seed) {
    if (batch.empty()) throw std::invalid_argument("meta: meta_step needs a non-empty task batch");

    MetaEpochMetrics metrics;
    metrics.epoch = state.epoch;
    ParamVector meta_grad(state.theta.size(), 0.0);
    long support_episodes = 0;

    for (const Task& task : batch) {
        const std::uint64_t ts = task_seed(task, seed);
        const InnerAdaptResult adapted = inner_adapt(ctx, state.theta, task, derive_seed(ts, 1));
        const QueryLoss q = query_loss(ctx, adapted.theta_prime, task, derive_seed(ts, 2));
        metrics.meta_loss += q.loss;
        for (std::size_t i = 0; i < meta_grad.size(); ++i) meta_grad[i] += q.grad[i];
        for (const EpisodeMetrics& em : adapted.support_metrics) {
            metrics.mean_support_reward += em.total_reward;
            metrics.mean_aoi += em.mean_aoi;
            metrics.mean_power_w += em.mean_power_w;
            metrics.mean_epsilon += em.epsilon;
            support_episodes += 1;
        }
    }
    if (support_episodes > 0) {
        metrics.mean_support_reward /= static_cast<double>(support_episodes);
        metrics.mean_aoi /= static_cast<double>(support_episodes);
        metrics.mean_power_w /= static_cast<double>(support_episodes);
        metrics.mean_epsilon /= static_cast<double>(support_episodes);
    }

    if (ctx.meta.beta > 0) {  // beta 0 freezes theta (useful for ablations)
        if (ctx.meta.meta_optimizer == MetaOptimizer::Adam) {
            adam_step_inplace(state.theta, meta_grad, state.meta_adam, ctx.meta.beta);
        } else {
            state.theta = sgd_step(state.theta, meta_grad, ctx.meta.beta);
        }
    }
    state.meta_loss_history.push_back(metrics.meta_loss);
    state.epoch += 1;
    return {std::move(state), metrics};
}

std::pair<MetaState, std::vector<MetaEpochMetrics>> meta_train(const MetaContext& ctx,
                                                               const std::vector<Task>& tasks,
                                                               std::uint64_t seed) {
    ctx.validate();
    if (tasks.empty()) throw std::invalid_argument("meta: meta_train needs at least one task");
    if (static_cast<std::size_t>(ctx.meta.task_batch_size) > tasks.size())
        throw std::invalid_argument("meta: task_batch_size exceeds the training family size");

    MetaState state;
    state.theta = init_params(ctx.arch(), derive_seed(seed, 0));
    state.meta_adam = AdamState(state.theta.size());

    std::vector<MetaEpochMetrics> history;
    history.reserve(ctx.meta.epochs);
    std::vector<std::size_t> order(tasks.size());

    for (int epoch = 0; epoch < ctx.meta.epochs; ++epoch) {
        const std::uint64_t epoch_seed = derive_seed(seed, 1 + static_cast<std::uint64_t>(epoch));
        auto rng = make_rng(derive_seed(epoch_seed, 0));

        // Partial Fisher-Yates: the first task_batch_size slots become a
        // uniform sample without replacement.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<Task> batch;
        batch.reserve(ctx.meta.task_batch_size);
        for (int k = 0; k < ctx.meta.task_batch_size; ++k) {
            const std::size_t pick = k + uniform_index(rng, order.size() - k);
            std::swap(order[k], order[pick]);
            batch.push_back(tasks[order[k]]);
        }

        MetaStepResult step = meta_step(ctx, std::move(state), batch, derive_seed(epoch_seed, 1));
        state = std::move(step.state);
        history.push_back(step.metrics);
    }
    return {std::move(state), std::move(history)};
}

std::vector<EvalResult> meta_test(const MetaContext& ctx, const ParamVector& theta,
                                  const Task& task, int shots, std::uint64_t seed) {
    if (shots < 0) throw std::invalid_argument("meta: shots must be >= 0");
    if (shots > ctx.meta.e_max)
        throw BudgetError("meta: shots exceeds the per-task budget e_max");

    const EnvConfig env = make_env(ctx.base_env, task);
    const MlpArchitecture arch = ctx.arch();
    const auto evaluate = [&](const ParamVector& params) {
        return evaluate_policy(env, arch, params, ctx.meta.eval_episodes, seed, ctx.dqn.gamma);
    };

    std::vector<EvalResult> curve;
    curve.reserve(shots + 1);
    curve.push_back(evaluate(theta));

    // Same machinery as inner_adapt (fresh clone, fresh buffer, lr alpha), but
    // the agent persists across shots so the buffer, optimizer state, and
    // epsilon schedule carry over; training pauses after each episode to
    // record the greedy evaluation.
    DqnHyperparams hp = ctx.dqn;
    hp.lr = ctx.meta.alpha;
    DqnAgent agent(arch, theta, hp);
    for (int k = 0; k < shots; ++k) {
        TrainOptions opts;
        opts.episodes = 1;
        opts.schedule_episode_offset = k;
        opts.schedule_total = shots;
        train_dqn(env, agent, opts, derive_seed(seed, static_cast<std::uint64_t>(k) + 1));
        curve.push_back(evaluate(agent.online_params));
    }
    return curve;
}

}  // namespace uavrl
