#include "uavrl/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "uavrl/rng.hpp"

namespace uavrl {

void MlpArchitecture::validate() const {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("nn: architecture needs at least input and output layers");
    for (int n : layer_sizes)
        if (n < 1) throw std::invalid_argument("nn: layer sizes must be >= 1");
}

std::size_t MlpArchitecture::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        n += static_cast<std::size_t>(layer_sizes[l]) * layer_sizes[l + 1];
        n += layer_sizes[l + 1];
    }
    return n;
}

MlpArchitecture MlpArchitecture::q_network(int state_features, int n_actions,
                                           const std::vector<int>& hidden) {
    MlpArchitecture arch;
    arch.layer_sizes.push_back(state_features);
    arch.layer_sizes.insert(arch.layer_sizes.end(), hidden.begin(), hidden.end());
    arch.layer_sizes.push_back(n_actions);
    arch.validate();
    return arch;
}

ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed) {
    arch.validate();
    auto rng = make_rng(seed);
    ParamVector params;
    params.reserve(arch.param_count());
    for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
        const int fan_in = arch.layer_sizes[l];
        const int fan_out = arch.layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / fan_in);
        for (int i = 0; i < fan_in * fan_out; ++i)
            params.push_back(uniform_real(rng, -bound, bound));
        for (int i = 0; i < fan_out; ++i) params.push_back(0.0);
    }
    return params;
}

namespace {

void check_params(const MlpArchitecture& arch, const ParamVector& params) {
    if (params.size() != arch.param_count())
        throw std::invalid_argument("nn: parameter vector length does not match architecture");
}

// Affine layer over a flat parameter slab: out_j = b_j + sum_i W[j,i] x_i.
void affine(const double* w, const double* b, const double* x, double* out, int n_in, int n_out) {
    for (int j = 0; j < n_out; ++j) {
        double acc = b[j];
        const double* wj = w + static_cast<std::size_t>(j) * n_in;
        for (int i = 0; i < n_in; ++i) acc += wj[i] * x[i];
        out[j] = acc;
    }
}

}  // namespace

std::vector<double> forward(const MlpArchitecture& arch, const ParamVector& params,
                            std::span<const double> input) {
    check_params(arch, params);
    if (static_cast<int>(input.size()) != arch.input_size())
        throw std::invalid_argument("nn: input length does not match architecture");

    std::vector<double> cur(input.begin(), input.end());
    std::vector<double> next;
    std::size_t offset = 0;
    const std::size_t n_layers = arch.layer_sizes.size();
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        const int n_in = arch.layer_sizes[l];
        const int n_out = arch.layer_sizes[l + 1];
        const double* w = params.data() + offset;
        const double* b = w + static_cast<std::size_t>(n_in) * n_out;
        next.resize(n_out);
        affine(w, b, cur.data(), next.data(), n_in, n_out);
        if (l + 2 < n_layers)
            for (double& v : next) v = v > 0.0 ? v : 0.0;
        cur.swap(next);
        offset += static_cast<std::size_t>(n_in) * n_out + n_out;
    }
    return cur;
}

ParamVector backward(const MlpArchitecture& arch, const ParamVector& params,
                     const std::vector<std::vector<double>>& inputs,
                     const std::vector<std::vector<double>>& grad_outputs) {
    check_params(arch, params);
    if (inputs.empty() || inputs.size() != grad_outputs.size())
        throw std::invalid_argument("nn: batch inputs and grad_outputs must match and be non-empty");

    const std::size_t n_layers = arch.layer_sizes.size();
    ParamVector grad(params.size(), 0.0);

    // Per-layer parameter offsets.
    std::vector<std::size_t> offsets(n_layers - 1);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        offsets[l] = off;
        off += static_cast<std::size_t>(arch.layer_sizes[l]) * arch.layer_sizes[l + 1] +
               arch.layer_sizes[l + 1];
    }

    std::vector<std::vector<double>> acts(n_layers);  // post-activation values per layer
    std::vector<double> delta, delta_prev;

    for (std::size_t b = 0; b < inputs.size(); ++b) {
        if (static_cast<int>(inputs[b].size()) != arch.input_size())
            throw std::invalid_argument("nn: batch input length does not match architecture");
        if (static_cast<int>(grad_outputs[b].size()) != arch.output_size())
            throw std::invalid_argument("nn: grad_output length does not match architecture");

        acts[0] = inputs[b];
        for (std::size_t l = 0; l + 1 < n_layers; ++l) {
            const int n_in = arch.layer_sizes[l];
            const int n_out = arch.layer_sizes[l + 1];
            const double* w = params.data() + offsets[l];
            const double* bias = w + static_cast<std::size_t>(n_in) * n_out;
            acts[l + 1].resize(n_out);
            affine(w, bias, acts[l].data(), acts[l + 1].data(), n_in, n_out);
            if (l + 2 < n_layers)
                for (double& v : acts[l + 1]) v = v > 0.0 ? v : 0.0;
        }

        delta = grad_outputs[b];
        for (std::size_t l = n_layers - 1; l-- > 0;) {
            const int n_in = arch.layer_sizes[l];
            const int n_out = arch.layer_sizes[l + 1];
            double* gw = grad.data() + offsets[l];
            double* gb = gw + static_cast<std::size_t>(n_in) * n_out;
            const double* x = acts[l].data();
            for (int j = 0; j < n_out; ++j) {
                const double dj = delta[j];
                double* gwj = gw + static_cast<std::size_t>(j) * n_in;
                for (int i = 0; i < n_in; ++i) gwj[i] += dj * x[i];
                gb[j] += dj;
            }
            if (l > 0) {
                const double* w = params.data() + offsets[l];
                delta_prev.assign(n_in, 0.0);
                for (int j = 0; j < n_out; ++j) {
                    const double dj = delta[j];
                    const double* wj = w + static_cast<std::size_t>(j) * n_in;
                    for (int i = 0; i < n_in; ++i) delta_prev[i] += wj[i] * dj;
                }
                // ReLU gate: post-activation is zero exactly where the unit was clamped.
                for (int i = 0; i < n_in; ++i)
                    if (acts[l][i] <= 0.0) delta_prev[i] = 0.0;
                delta.swap(delta_prev);
            }
        }
    }

    const double inv_b = 1.0 / static_cast<double>(inputs.size());
    for (double& g : grad) g *= inv_b;
    return grad;
}

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double lr) {
    if (params.size() != grad.size())
        throw std::invalid_argument("nn: params and grad lengths differ");
    if (!(lr > 0)) throw std::invalid_argument("nn: learning rate must be > 0");
    ParamVector next(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) next[i] = params[i] - lr * grad[i];
    return next;
}

void adam_step_inplace(ParamVector& params, const ParamVector& grad, AdamState& state, double lr) {
    if (params.size() != grad.size() || state.first_moment.size() != params.size() ||
        state.second_moment.size() != params.size())
        throw std::invalid_argument("nn: adam state and vector lengths differ");
    if (!(lr > 0)) throw std::invalid_argument("nn: learning rate must be > 0");

    state.step_count += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step_count));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step_count));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = b1 * m + (1.0 - b1) * grad[i];
        v = b2 * v + (1.0 - b2) * grad[i] * grad[i];
        const double m_hat = m / c1;
        const double v_hat = v / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

std::pair<ParamVector, AdamState> adam_step(const ParamVector& params, const ParamVector& grad,
                                            const AdamState& state, double lr) {
    ParamVector p = params;
    AdamState s = state;
    adam_step_inplace(p, grad, s, lr);
    return {std::move(p), std::move(s)};
}

}  // namespace uavrl
