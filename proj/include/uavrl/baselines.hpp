#pragma once

#include "uavrl/env.hpp"
#include "uavrl/rl.hpp"

namespace uavrl {

// Scripted comparison policies. RoundRobin and MaxAgeFirst move the UAV one
// greedy Manhattan step toward the scheduled device's cell; Random draws a
// uniform action.
enum class BaselineKind { RoundRobin, MaxAgeFirst, Random };

PolicyFn baseline_policy(BaselineKind kind, const EnvConfig& cfg);

// Cell containing a continuous position, clamped onto the grid.
GridCell cell_of_position(const EnvConfig& cfg, std::array<double, 2> xy);

}  // namespace uavrl
