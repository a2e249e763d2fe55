#include "uavrl/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "uavrl/rng.hpp"

namespace uavrl {

GridCell cell_of_position(const EnvConfig& cfg, std::array<double, 2> xy) {
    const double d0 = cfg.cell_size_m();
    const auto clamp_cell = [&](double coord) {
        const int c = static_cast<int>(std::floor(coord / d0));
        return std::clamp(c, 0, cfg.cells_per_side - 1);
    };
    return {clamp_cell(xy[0]), clamp_cell(xy[1])};
}

namespace {

// One Manhattan step toward the target cell, columns first.
Move step_toward(GridCell from, GridCell to) {
    if (from.col < to.col) return Move::East;
    if (from.col > to.col) return Move::West;
    if (from.row < to.row) return Move::North;
    if (from.row > to.row) return Move::South;
    return Move::Hover;
}

Action seek_device(const EnvConfig& cfg, const EnvState& s, int device) {
    const GridCell target = cell_of_position(cfg, cfg.device_positions[device]);
    return {device, step_toward(s.uav_cell, target)};
}

}  // namespace

PolicyFn baseline_policy(BaselineKind kind, const EnvConfig& cfg) {
    cfg.validate();
    switch (kind) {
        case BaselineKind::RoundRobin:
            return [](const EnvConfig& env, const EnvState& s, std::mt19937_64&) {
                return seek_device(env, s, s.step_count % env.device_count());
            };
        case BaselineKind::MaxAgeFirst:
            return [](const EnvConfig& env, const EnvState& s, std::mt19937_64&) {
                const auto it = std::max_element(s.aoi.begin(), s.aoi.end());
                return seek_device(env, s, static_cast<int>(it - s.aoi.begin()));
            };
        case BaselineKind::Random:
            return [](const EnvConfig& env, const EnvState&, std::mt19937_64& rng) {
                return Action::from_index(static_cast<int>(
                    uniform_index(rng, static_cast<std::size_t>(env.action_count()))));
            };
    }
    throw std::logic_error("baselines: unreachable kind");
}

}  // namespace uavrl
