#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace uavrl {

// One UAV collects data from fixed ground devices on a square grid of cells.
// Per time slot the UAV moves one cell (or hovers) and polls exactly one
// device; the reward trades mean age-of-information against the polled
// device's transmit power.

struct EnvConfig {
    double side_length_m = 1000.0;   // grid side L
    int cells_per_side = 10;
    double uav_altitude_m = 100.0;
    double g0_db = -30.0;            // channel gain at 1 m reference distance
    double bandwidth_hz = 1e6;
    double packet_bits = 5e6;
    double noise_power_w = 1e-13;    // -100 dBm
    int a_max = 30;                  // age saturation cap
    double omega = 1.0;              // AoI weight (uniform across devices)
    std::vector<double> omega_per_device;  // optional per-device override
    double lambda_tradeoff = 0.0;    // weight on transmit power in the reward
    int horizon = 100;               // steps per episode
    std::vector<std::array<double, 2>> device_positions;  // continuous (x, y)

    double cell_size_m() const { return side_length_m / cells_per_side; }
    int device_count() const { return static_cast<int>(device_positions.size()); }
    int action_count() const { return device_count() * 5; }
    double device_weight(int device) const {
        return omega_per_device.empty() ? omega : omega_per_device[device];
    }

    // Throws std::invalid_argument when any invariant is broken.
    void validate() const;
};

struct GridCell {
    int col = 0;
    int row = 0;
    bool operator==(const GridCell&) const = default;
};

enum class Move { North = 0, South = 1, East = 2, West = 3, Hover = 4 };
inline constexpr int kMoveCount = 5;

struct Action {
    int device = 0;
    Move move = Move::Hover;

    // Flat encoding: device * 5 + move, a bijection onto [0, D*5).
    int to_index() const { return device * kMoveCount + static_cast<int>(move); }
    static Action from_index(int index) {
        return Action{index / kMoveCount, static_cast<Move>(index % kMoveCount)};
    }
    bool operator==(const Action&) const = default;
};

struct EnvState {
    GridCell uav_cell;
    std::vector<int> aoi;  // one entry per device, each in [1, a_max]
    int step_count = 0;
};

struct StepOutcome {
    EnvState next_state;
    double reward = 0.0;
    double power_w = 0.0;   // transmit power of the polled device this slot
    double mean_aoi = 0.0;  // unweighted mean of the post-update ages
    bool done = false;
};

// Continuous coordinates of a cell center: ((col + 0.5) d0, (row + 0.5) d0).
std::array<double, 2> cell_center(const EnvConfig& cfg, GridCell cell);

// Line-of-sight channel gain g0 / (h^2 + r^2), linear scale.
double channel_gain(const EnvConfig& cfg, std::array<double, 2> uav_xy, int device);

// Power needed to deliver one packet within a slot: (2^(M/BW) - 1) sigma^2 / gain.
double transmit_power(const EnvConfig& cfg, std::array<double, 2> uav_xy, int device);

// The polled device resets to 1; every other age increments, capped at a_max.
std::vector<int> update_aoi(const std::vector<int>& aoi, int scheduled, int a_max);

// One-cell move; moves that would leave the grid keep the current cell.
GridCell move_uav(const EnvConfig& cfg, GridCell cell, Move move);

// r = -(1/D) sum_d w_d A_d - lambda sum_d P_d. Only the polled device has a
// nonzero entry in powers_w, so the power sum charges one transmission.
double reward(const EnvConfig& cfg, const std::vector<int>& aoi_next,
              const std::vector<double>& powers_w);

// Applies the move, updates ages, and computes the reward with the polled
// device's power measured at the UAV's new position. Deterministic.
StepOutcome step(const EnvConfig& cfg, const EnvState& state, const Action& action);

// Fresh episode: uniformly random UAV cell, all ages at 1, step_count 0.
EnvState reset(const EnvConfig& cfg, std::mt19937_64& rng);
EnvState reset(const EnvConfig& cfg, std::uint64_t seed);

// Normalized features [col/(cells-1), row/(cells-1), A_1/a_max, ..., A_D/a_max].
std::vector<double> encode_state(const EnvConfig& cfg, const EnvState& state);
int feature_count(const EnvConfig& cfg);

// Uniform device layout over [0, L]^2 from a dedicated layout seed.
std::vector<std::array<double, 2>> generate_device_positions(double side_length_m,
                                                             int count,
                                                             std::uint64_t layout_seed);

}  // namespace uavrl
