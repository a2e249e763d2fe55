#pragma once

#include <filesystem>
#include <vector>

#include "uavrl/config.hpp"

namespace uavrl {

// Dispatches on cfg.mode and writes every artifact (metrics CSV, checkpoints,
// task list, manifest) into cfg.output_dir. Rerunning with the same config
// and seed reproduces the CSVs byte-exactly apart from the wall-time column.
// Returns the written paths.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg);

}  // namespace uavrl
