#include "uavrl/rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uavrl/rng.hpp"

namespace uavrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("rl: replay capacity must be >= 1");
    storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Transition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[head_] = std::move(t);  // overwrite the oldest entry
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= storage_.size()) throw std::out_of_range("rl: replay index out of range");
    if (storage_.size() < capacity_) return storage_[i];
    return storage_[(head_ + i) % capacity_];
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
    if (storage_.size() < batch_size)
        throw std::logic_error("rl: cannot sample a batch from an underfilled replay buffer");
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i)
        batch.push_back(storage_[uniform_index(rng, storage_.size())]);
    return batch;
}

void DqnHyperparams::validate() const {
    if (!(gamma >= 0 && gamma < 1)) throw std::invalid_argument("rl: gamma must be in [0, 1)");
    if (!(lr > 0)) throw std::invalid_argument("rl: lr must be > 0");
    if (batch_size < 1) throw std::invalid_argument("rl: batch_size must be >= 1");
    if (target_update_interval < 1)
        throw std::invalid_argument("rl: target_update_interval must be >= 1");
    if (!(epsilon_end >= 0 && epsilon_end <= epsilon_start && epsilon_start <= 1))
        throw std::invalid_argument("rl: need 0 <= epsilon_end <= epsilon_start <= 1");
    if (!(epsilon_decay_fraction >= 0 && epsilon_decay_fraction <= 1))
        throw std::invalid_argument("rl: epsilon_decay_fraction must be in [0, 1]");
    if (buffer_capacity == 0) throw std::invalid_argument("rl: buffer_capacity must be >= 1");
}

DqnAgent::DqnAgent(MlpArchitecture architecture, ParamVector initial_params, DqnHyperparams hyper)
    : arch(std::move(architecture)),
      online_params(std::move(initial_params)),
      target_params(online_params),
      adam(online_params.size()),
      buffer(hyper.buffer_capacity),
      hp(hyper),
      rng(make_rng(0)) {
    arch.validate();
    hp.validate();
    if (online_params.size() != arch.param_count())
        throw std::invalid_argument("rl: initial parameter length does not match architecture");
}

DqnAgent make_agent(const EnvConfig& cfg, const DqnHyperparams& hp, const std::vector<int>& hidden,
                    std::uint64_t init_seed) {
    auto arch = MlpArchitecture::q_network(feature_count(cfg), cfg.action_count(), hidden);
    return DqnAgent(arch, init_params(arch, init_seed), hp);
}

double epsilon_at(const DqnHyperparams& hp, long episode, long total_episodes) {
    if (episode < 0 || episode > total_episodes)
        throw std::invalid_argument("rl: episode outside [0, total_episodes]");
    const double decay_span = hp.epsilon_decay_fraction * static_cast<double>(total_episodes);
    if (decay_span <= 0.0 || static_cast<double>(episode) >= decay_span) return hp.epsilon_end;
    const double frac = static_cast<double>(episode) / decay_span;
    return hp.epsilon_start + frac * (hp.epsilon_end - hp.epsilon_start);
}

int select_action(const MlpArchitecture& arch, const ParamVector& params,
                  std::span<const double> state_features, double epsilon, int n_actions,
                  std::mt19937_64& rng) {
    if (!(epsilon >= 0 && epsilon <= 1)) throw std::invalid_argument("rl: epsilon must be in [0, 1]");
    if (epsilon > 0 && uniform_real01(rng) < epsilon)
        return static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_actions)));
    const auto q = forward(arch, params, state_features);
    if (static_cast<int>(q.size()) != n_actions)
        throw std::invalid_argument("rl: network output size does not match action count");
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
        if (q[a] > q[best]) best = a;
    return best;
}

TdLoss td_loss(const MlpArchitecture& arch, const ParamVector& params,
               const ParamVector& target_params, const std::vector<Transition>& batch,
               double gamma, bool terminal_bootstrap_mask) {
    if (batch.empty()) throw std::invalid_argument("rl: td_loss needs a non-empty batch");

    const std::size_t n = batch.size();
    std::vector<std::vector<double>> inputs(n);
    std::vector<std::vector<double>> grad_outputs(n);
    double loss = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
        const Transition& t = batch[b];
        const auto q = forward(arch, params, t.state);
        double y = t.reward;
        if (!(t.done && terminal_bootstrap_mask)) {
            const auto qn = forward(arch, target_params, t.next_state);
            y += gamma * *std::max_element(qn.begin(), qn.end());
        }
        const double err = q[t.action] - y;  // target treated as a constant
        loss += err * err;
        inputs[b] = t.state;
        grad_outputs[b].assign(q.size(), 0.0);
        grad_outputs[b][t.action] = 2.0 * err;
    }
    loss /= static_cast<double>(n);
    return {loss, backward(arch, params, inputs, grad_outputs)};
}

std::vector<EpisodeMetrics> train_dqn(const EnvConfig& cfg, DqnAgent& agent,
                                      const TrainOptions& opts, std::uint64_t seed) {
    cfg.validate();
    EnvConfig env = cfg;
    if (opts.horizon > 0) env.horizon = opts.horizon;
    const long schedule_total = opts.schedule_total < 0 ? opts.episodes : opts.schedule_total;

    agent.rng = make_rng(seed);
    std::vector<EpisodeMetrics> history;
    history.reserve(opts.episodes);

    for (int e = 0; e < opts.episodes; ++e) {
        const double eps = epsilon_at(agent.hp, opts.schedule_episode_offset + e, schedule_total);
        EnvState state = reset(env, agent.rng);
        std::vector<double> features = encode_state(env, state);

        EpisodeMetrics m;
        m.episode = agent.episodes_done;
        m.epsilon = eps;
        double loss_sum = 0.0;
        long loss_count = 0;

        for (int t = 0; t < env.horizon; ++t) {
            const int a = select_action(agent.arch, agent.online_params, features, eps,
                                        env.action_count(), agent.rng);
            const StepOutcome out = step(env, state, Action::from_index(a));
            std::vector<double> next_features = encode_state(env, out.next_state);
            agent.buffer.push({features, a, out.reward, next_features, out.done});
            agent.env_steps += 1;

            if (agent.buffer.size() >= static_cast<std::size_t>(agent.hp.batch_size)) {
                const auto batch =
                    agent.buffer.sample(static_cast<std::size_t>(agent.hp.batch_size), agent.rng);
                const TdLoss td = td_loss(agent.arch, agent.online_params, agent.target_params,
                                          batch, agent.hp.gamma, agent.hp.terminal_bootstrap_mask);
                if (opts.use_sgd) {
                    agent.online_params = sgd_step(agent.online_params, td.grad, agent.hp.lr);
                } else {
                    adam_step_inplace(agent.online_params, td.grad, agent.adam, agent.hp.lr);
                }
                agent.updates_done += 1;
                if (agent.updates_done % agent.hp.target_update_interval == 0)
                    agent.target_params = agent.online_params;
                loss_sum += td.loss;
                loss_count += 1;
            }

            m.total_reward += out.reward;
            m.mean_aoi += out.mean_aoi;
            m.mean_power_w += out.power_w;
            state = out.next_state;
            features = std::move(next_features);
        }

        m.mean_aoi /= env.horizon;
        m.mean_power_w /= env.horizon;
        m.mean_td_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
        history.push_back(m);
        agent.episodes_done += 1;
    }
    return history;
}

std::vector<EpisodeMetrics> train_dqn(const EnvConfig& cfg, DqnAgent& agent, int episodes,
                                      int horizon, std::uint64_t seed) {
    TrainOptions opts;
    opts.episodes = episodes;
    opts.horizon = horizon;
    return train_dqn(cfg, agent, opts, seed);
}

PolicyFn greedy_policy(const MlpArchitecture& arch, ParamVector params) {
    return [arch, params = std::move(params)](const EnvConfig& cfg, const EnvState& s,
                                              std::mt19937_64& rng) {
        const auto features = encode_state(cfg, s);
        return Action::from_index(
            select_action(arch, params, features, 0.0, cfg.action_count(), rng));
    };
}

namespace {

struct RolloutAccumulator {
    double reward_sum = 0.0;
    double aoi_sum = 0.0;
    double power_sum = 0.0;
    double return_sum = 0.0;
    long steps = 0;
    int episodes = 0;

    void add_episode(const EnvConfig& cfg, const PolicyFn& policy, EnvState state,
                     std::mt19937_64& rng, double gamma) {
        double discount = 1.0;
        for (int t = 0; t < cfg.horizon; ++t) {
            const Action a = policy(cfg, state, rng);
            const StepOutcome out = step(cfg, state, a);
            reward_sum += out.reward;
            aoi_sum += out.mean_aoi;
            power_sum += out.power_w;
            return_sum += discount * out.reward;
            discount *= gamma;
            steps += 1;
            state = out.next_state;
        }
        episodes += 1;
    }

    EvalResult finish() const {
        EvalResult r;
        r.episodes = episodes;
        if (steps > 0) {
            r.mean_step_reward = reward_sum / static_cast<double>(steps);
            r.mean_aoi = aoi_sum / static_cast<double>(steps);
            r.mean_power_w = power_sum / static_cast<double>(steps);
        }
        if (episodes > 0) {
            r.mean_episode_reward = reward_sum / episodes;
            r.mean_return = return_sum / episodes;
        }
        return r;
    }
};

}  // namespace

EvalResult rollout_policy(const EnvConfig& cfg, const PolicyFn& policy, int episodes,
                          std::uint64_t seed, double gamma) {
    cfg.validate();
    auto rng = make_rng(seed);
    RolloutAccumulator acc;
    for (int e = 0; e < episodes; ++e) acc.add_episode(cfg, policy, reset(cfg, rng), rng, gamma);
    return acc.finish();
}

EvalResult rollout_policy_from_starts(const EnvConfig& cfg, const PolicyFn& policy,
                                      std::span<const GridCell> starts, double gamma) {
    cfg.validate();
    auto rng = make_rng(0);  // only consumed by stochastic policies
    RolloutAccumulator acc;
    for (const GridCell& cell : starts) {
        EnvState s;
        s.uav_cell = cell;
        s.aoi.assign(cfg.device_positions.size(), 1);
        acc.add_episode(cfg, policy, std::move(s), rng, gamma);
    }
    return acc.finish();
}

std::vector<GridCell> all_cells(const EnvConfig& cfg) {
    std::vector<GridCell> cells;
    cells.reserve(static_cast<std::size_t>(cfg.cells_per_side) * cfg.cells_per_side);
    for (int row = 0; row < cfg.cells_per_side; ++row)
        for (int col = 0; col < cfg.cells_per_side; ++col) cells.push_back({col, row});
    return cells;
}

EvalResult evaluate_policy(const EnvConfig& cfg, const MlpArchitecture& arch,
                           const ParamVector& params, int episodes, std::uint64_t seed,
                           double gamma) {
    return rollout_policy(cfg, greedy_policy(arch, params), episodes, seed, gamma);
}

// ---- tabular oracles -------------------------------------------------------

StateIndexer::StateIndexer(const EnvConfig& cfg, std::size_t max_states)
    : cells_(cfg.cells_per_side), a_max_(cfg.a_max), devices_(cfg.device_count()) {
    std::size_t total = static_cast<std::size_t>(cells_) * cells_;
    for (int d = 0; d < devices_; ++d) {
        if (total > max_states / static_cast<std::size_t>(a_max_) + 1)
            throw std::length_error("rl: state space too large to enumerate");
        total *= static_cast<std::size_t>(a_max_);
        if (total > max_states) throw std::length_error("rl: state space too large to enumerate");
    }
    total_ = total;
}

std::size_t StateIndexer::encode(const EnvState& s) const {
    std::size_t idx = static_cast<std::size_t>(s.uav_cell.row) * cells_ + s.uav_cell.col;
    for (int d = 0; d < devices_; ++d) idx = idx * a_max_ + static_cast<std::size_t>(s.aoi[d] - 1);
    return idx;
}

EnvState StateIndexer::decode(std::size_t index) const {
    EnvState s;
    s.aoi.assign(devices_, 1);
    for (int d = devices_ - 1; d >= 0; --d) {
        s.aoi[d] = static_cast<int>(index % a_max_) + 1;
        index /= a_max_;
    }
    s.uav_cell.col = static_cast<int>(index % cells_);
    s.uav_cell.row = static_cast<int>(index / cells_);
    return s;
}

int QTable::greedy_action(std::size_t state) const {
    const double* row = values.data() + state * n_actions;
    int best = 0;
    for (int a = 1; a < n_actions; ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

QTable tabular_q_learning(const EnvConfig& cfg, const TabularHyperparams& hp, int episodes,
                          std::uint64_t seed) {
    cfg.validate();
    QTable table{StateIndexer(cfg), {}, cfg.action_count()};
    table.values.assign(table.indexer.total() * static_cast<std::size_t>(table.n_actions), 0.0);

    auto rng = make_rng(seed);
    const double decay_span = hp.epsilon_decay_fraction * episodes;
    for (int e = 0; e < episodes; ++e) {
        double eps = hp.epsilon_end;
        if (decay_span > 0 && e < decay_span)
            eps = hp.epsilon_start + (e / decay_span) * (hp.epsilon_end - hp.epsilon_start);

        EnvState state = reset(cfg, rng);
        std::size_t s_idx = table.indexer.encode(state);
        for (int t = 0; t < cfg.horizon; ++t) {
            int a;
            if (eps > 0 && uniform_real01(rng) < eps)
                a = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(table.n_actions)));
            else
                a = table.greedy_action(s_idx);

            const StepOutcome out = step(cfg, state, Action::from_index(a));
            const std::size_t next_idx = table.indexer.encode(out.next_state);
            double target = out.reward;
            if (!(out.done && hp.terminal_bootstrap_mask))
                target += hp.gamma * table.q(next_idx, table.greedy_action(next_idx));
            double& q = table.values[s_idx * table.n_actions + a];
            q += hp.alpha * (target - q);

            state = out.next_state;
            s_idx = next_idx;
        }
    }
    return table;
}

ValueIterationResult value_iteration(const EnvConfig& cfg, double gamma, double tol,
                                     int max_iterations) {
    cfg.validate();
    if (!(gamma >= 0 && gamma < 1)) throw std::invalid_argument("rl: gamma must be in [0, 1)");
    if (!(tol > 0)) throw std::invalid_argument("rl: tol must be > 0");

    ValueIterationResult res{StateIndexer(cfg), {}, {}, 0};
    const std::size_t n_states = res.indexer.total();
    const int n_actions = cfg.action_count();

    // The MDP is deterministic, so transitions and rewards can be tabulated.
    std::vector<std::size_t> next_idx(n_states * n_actions);
    std::vector<double> step_reward(n_states * n_actions);
    for (std::size_t s = 0; s < n_states; ++s) {
        EnvState state = res.indexer.decode(s);
        for (int a = 0; a < n_actions; ++a) {
            const Action action = Action::from_index(a);
            EnvState next;
            next.uav_cell = move_uav(cfg, state.uav_cell, action.move);
            next.aoi = update_aoi(state.aoi, action.device, cfg.a_max);
            std::vector<double> powers(cfg.device_positions.size(), 0.0);
            powers[action.device] =
                transmit_power(cfg, cell_center(cfg, next.uav_cell), action.device);
            next_idx[s * n_actions + a] = res.indexer.encode(next);
            step_reward[s * n_actions + a] = reward(cfg, next.aoi, powers);
        }
    }

    res.values.assign(n_states, 0.0);
    std::vector<double> updated(n_states);
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        double max_change = 0.0;
        for (std::size_t s = 0; s < n_states; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            const std::size_t base = s * n_actions;
            for (int a = 0; a < n_actions; ++a) {
                const double q = step_reward[base + a] + gamma * res.values[next_idx[base + a]];
                if (q > best) best = q;
            }
            updated[s] = best;
            max_change = std::max(max_change, std::abs(best - res.values[s]));
        }
        res.values.swap(updated);
        if (max_change < tol) break;
    }

    res.policy.assign(n_states, 0);
    for (std::size_t s = 0; s < n_states; ++s) {
        const std::size_t base = s * n_actions;
        int best_a = 0;
        double best = step_reward[base] + gamma * res.values[next_idx[base]];
        for (int a = 1; a < n_actions; ++a) {
            const double q = step_reward[base + a] + gamma * res.values[next_idx[base + a]];
            if (q > best) {
                best = q;
                best_a = a;
            }
        }
        res.policy[s] = best_a;
    }
    return res;
}

PolicyFn table_policy(const QTable& table) {
    // Capturing the table by value keeps the policy usable past the table's scope.
    auto values = table.values;
    auto indexer = table.indexer;
    const int n_actions = table.n_actions;
    return [values = std::move(values), indexer, n_actions](const EnvConfig&, const EnvState& s,
                                                            std::mt19937_64&) {
        const std::size_t idx = indexer.encode(s);
        const double* row = values.data() + idx * n_actions;
        int best = 0;
        for (int a = 1; a < n_actions; ++a)
            if (row[a] > row[best]) best = a;
        return Action::from_index(best);
    };
}

PolicyFn table_policy(const ValueIterationResult& vi) {
    auto policy = vi.policy;
    auto indexer = vi.indexer;
    return [policy = std::move(policy), indexer](const EnvConfig&, const EnvState& s,
                                                 std::mt19937_64&) {
        return Action::from_index(policy[indexer.encode(s)]);
    };
}

}  // namespace uavrl
