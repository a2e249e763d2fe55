#pragma once

#include <filesystem>

#include "uavrl/nn.hpp"

namespace uavrl {

// Flat binary parameter snapshot; byte layout documented in docs/formats.md.
// Magic "MLPCKPT1", then the layer-size list, then the raw 64-bit parameters.

struct Checkpoint {
    MlpArchitecture arch;
    ParamVector params;
};

void save_checkpoint(const std::filesystem::path& path, const MlpArchitecture& arch,
                     const ParamVector& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace uavrl
