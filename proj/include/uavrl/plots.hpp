#pragma once

#include <filesystem>
#include <vector>

#include "uavrl/metrics.hpp"

namespace uavrl {

// Renders one SVG per metrics CSV (named after the CSV stem): learning curves
// for train/meta-train runs, one adaptation polyline per run_id for meta-test
// runs, and an AoI-vs-power scatter for sweeps. Pure rendering; the only
// derived statistic is a trailing moving average whose window is recorded in
// the SVG <desc>. Returns the written paths.
std::vector<std::filesystem::path> emit_plots(const std::vector<std::filesystem::path>& csv_paths,
                                              const std::filesystem::path& out_dir);

}  // namespace uavrl
