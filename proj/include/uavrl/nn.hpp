#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace uavrl {

// Dense feed-forward network, ReLU hidden layers, identity output. Parameters
// live in a flat vector so learned initializations can be copied, diffed and
// checkpointed as plain values. 64-bit floats throughout.

struct MlpArchitecture {
    std::vector<int> layer_sizes;  // input, hidden..., output

    void validate() const;
    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t param_count() const;

    static MlpArchitecture q_network(int state_features, int n_actions,
                                     const std::vector<int>& hidden = {256, 256});
    bool operator==(const MlpArchitecture&) const = default;
};

// Layout: for each layer, the weight matrix (row-major, out x in) followed by
// the bias vector. See docs/formats.md for the checkpoint byte layout.
using ParamVector = std::vector<double>;

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n) : first_moment(n, 0.0), second_moment(n, 0.0) {}
};

// He-uniform weights (+-sqrt(6/fan_in)), zero biases. Deterministic per seed.
ParamVector init_params(const MlpArchitecture& arch, std::uint64_t seed);

std::vector<double> forward(const MlpArchitecture& arch, const ParamVector& params,
                            std::span<const double> input);

// Gradient w.r.t. params of (1/B) sum_b <grad_outputs[b], f(inputs[b]; params)>.
// Callers express their loss by supplying dLoss/dOutput per sample.
ParamVector backward(const MlpArchitecture& arch, const ParamVector& params,
                     const std::vector<std::vector<double>>& inputs,
                     const std::vector<std::vector<double>>& grad_outputs);

ParamVector sgd_step(const ParamVector& params, const ParamVector& grad, double lr);

std::pair<ParamVector, AdamState> adam_step(const ParamVector& params, const ParamVector& grad,
                                            const AdamState& state, double lr);
// In-place variant used by training loops.
void adam_step_inplace(ParamVector& params, const ParamVector& grad, AdamState& state, double lr);

}  // namespace uavrl
