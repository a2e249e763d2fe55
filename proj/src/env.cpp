#include "uavrl/env.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "uavrl/rng.hpp"

namespace uavrl {

void EnvConfig::validate() const {
    if (cells_per_side < 2) throw std::invalid_argument("env: cells_per_side must be >= 2");
    if (!(side_length_m > 0)) throw std::invalid_argument("env: side_length_m must be > 0");
    if (!(uav_altitude_m > 0)) throw std::invalid_argument("env: uav_altitude_m must be > 0");
    if (!(bandwidth_hz > 0)) throw std::invalid_argument("env: bandwidth_hz must be > 0");
    if (packet_bits < 0) throw std::invalid_argument("env: packet_bits must be >= 0");
    if (!(noise_power_w > 0)) throw std::invalid_argument("env: noise_power_w must be > 0");
    if (a_max < 1) throw std::invalid_argument("env: a_max must be >= 1");
    if (!(omega > 0)) throw std::invalid_argument("env: omega must be > 0");
    if (lambda_tradeoff < 0) throw std::invalid_argument("env: lambda_tradeoff must be >= 0");
    if (horizon < 1) throw std::invalid_argument("env: horizon must be >= 1");
    if (device_positions.empty()) throw std::invalid_argument("env: at least one device required");
    if (!omega_per_device.empty()) {
        if (omega_per_device.size() != device_positions.size())
            throw std::invalid_argument("env: omega_per_device length must match device count");
        for (double w : omega_per_device)
            if (!(w > 0)) throw std::invalid_argument("env: omega_per_device entries must be > 0");
    }
    for (const auto& p : device_positions) {
        if (p[0] < 0 || p[0] > side_length_m || p[1] < 0 || p[1] > side_length_m)
            throw std::invalid_argument("env: device position outside the grid area");
    }
}

namespace {

void check_cell(const EnvConfig& cfg, GridCell cell) {
    if (cell.col < 0 || cell.col >= cfg.cells_per_side || cell.row < 0 ||
        cell.row >= cfg.cells_per_side)
        throw std::invalid_argument("env: cell index outside the grid");
}

void check_device(const EnvConfig& cfg, int device) {
    if (device < 0 || device >= cfg.device_count())
        throw std::invalid_argument("env: device index out of range");
}

}  // namespace

std::array<double, 2> cell_center(const EnvConfig& cfg, GridCell cell) {
    check_cell(cfg, cell);
    const double d0 = cfg.cell_size_m();
    return {d0 * (cell.col + 0.5), d0 * (cell.row + 0.5)};
}

double channel_gain(const EnvConfig& cfg, std::array<double, 2> uav_xy, int device) {
    check_device(cfg, device);
    const auto& dev = cfg.device_positions[device];
    const double dx = uav_xy[0] - dev[0];
    const double dy = uav_xy[1] - dev[1];
    const double r2 = dx * dx + dy * dy;
    const double g0_lin = std::pow(10.0, cfg.g0_db / 10.0);
    return g0_lin / (cfg.uav_altitude_m * cfg.uav_altitude_m + r2);
}

double transmit_power(const EnvConfig& cfg, std::array<double, 2> uav_xy, int device) {
    const double snr_gap = std::exp2(cfg.packet_bits / cfg.bandwidth_hz) - 1.0;
    return snr_gap * cfg.noise_power_w / channel_gain(cfg, uav_xy, device);
}

std::vector<int> update_aoi(const std::vector<int>& aoi, int scheduled, int a_max) {
    if (scheduled < 0 || scheduled >= static_cast<int>(aoi.size()))
        throw std::invalid_argument("env: scheduled device index out of range");
    std::vector<int> next(aoi.size());
    for (std::size_t d = 0; d < aoi.size(); ++d)
        next[d] = static_cast<int>(d) == scheduled ? 1 : std::min(a_max, aoi[d] + 1);
    return next;
}

GridCell move_uav(const EnvConfig& cfg, GridCell cell, Move move) {
    check_cell(cfg, cell);
    GridCell next = cell;
    switch (move) {
        case Move::North: next.row += 1; break;
        case Move::South: next.row -= 1; break;
        case Move::East: next.col += 1; break;
        case Move::West: next.col -= 1; break;
        case Move::Hover: break;
    }
    const int last = cfg.cells_per_side - 1;
    if (next.col < 0 || next.col > last || next.row < 0 || next.row > last)
        return cell;  // boundary clamp: stay in place instead of leaving the grid
    return next;
}

double reward(const EnvConfig& cfg, const std::vector<int>& aoi_next,
              const std::vector<double>& powers_w) {
    const std::size_t d_count = cfg.device_positions.size();
    if (aoi_next.size() != d_count || powers_w.size() != d_count)
        throw std::invalid_argument("env: reward vectors must have one entry per device");
    double weighted_age = 0.0;
    double power_sum = 0.0;
    for (std::size_t d = 0; d < d_count; ++d) {
        weighted_age += cfg.device_weight(static_cast<int>(d)) * aoi_next[d];
        power_sum += powers_w[d];
    }
    return -weighted_age / static_cast<double>(d_count) - cfg.lambda_tradeoff * power_sum;
}

StepOutcome step(const EnvConfig& cfg, const EnvState& state, const Action& action) {
    check_device(cfg, action.device);
    if (state.step_count >= cfg.horizon)
        throw std::logic_error("env: step() called on a finished episode");

    StepOutcome out;
    out.next_state.uav_cell = move_uav(cfg, state.uav_cell, action.move);
    out.next_state.aoi = update_aoi(state.aoi, action.device, cfg.a_max);
    out.next_state.step_count = state.step_count + 1;

    // Power is measured at the post-move position: the UAV moves and then
    // receives within the same slot.
    out.power_w = transmit_power(cfg, cell_center(cfg, out.next_state.uav_cell), action.device);
    std::vector<double> powers(cfg.device_positions.size(), 0.0);
    powers[action.device] = out.power_w;
    out.reward = reward(cfg, out.next_state.aoi, powers);
    out.mean_aoi = std::accumulate(out.next_state.aoi.begin(), out.next_state.aoi.end(), 0.0) /
                   static_cast<double>(out.next_state.aoi.size());
    out.done = out.next_state.step_count == cfg.horizon;
    return out;
}

EnvState reset(const EnvConfig& cfg, std::mt19937_64& rng) {
    EnvState s;
    s.uav_cell.col = static_cast<int>(uniform_index(rng, cfg.cells_per_side));
    s.uav_cell.row = static_cast<int>(uniform_index(rng, cfg.cells_per_side));
    s.aoi.assign(cfg.device_positions.size(), 1);
    s.step_count = 0;
    return s;
}

EnvState reset(const EnvConfig& cfg, std::uint64_t seed) {
    auto rng = make_rng(seed);
    return reset(cfg, rng);
}

int feature_count(const EnvConfig& cfg) { return 2 + cfg.device_count(); }

std::vector<double> encode_state(const EnvConfig& cfg, const EnvState& state) {
    check_cell(cfg, state.uav_cell);
    std::vector<double> features;
    features.reserve(2 + state.aoi.size());
    const double denom = cfg.cells_per_side - 1;
    features.push_back(state.uav_cell.col / denom);
    features.push_back(state.uav_cell.row / denom);
    for (int a : state.aoi) features.push_back(static_cast<double>(a) / cfg.a_max);
    return features;
}

std::vector<std::array<double, 2>> generate_device_positions(double side_length_m, int count,
                                                             std::uint64_t layout_seed) {
    auto rng = make_rng(layout_seed);
    std::vector<std::array<double, 2>> positions(count);
    for (auto& p : positions) {
        p[0] = uniform_real(rng, 0.0, side_length_m);
        p[1] = uniform_real(rng, 0.0, side_length_m);
    }
    return positions;
}

}  // namespace uavrl
