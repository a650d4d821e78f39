#pragma once

#include <filesystem>

#include "dcrm/trainer.hpp"

namespace dcrm {

/// Binary checkpoint, little-endian: "DCRMCKPT" | u32 version | model info and
/// network configuration | parameters in declaration order (name, shape,
/// f64 values) | batch-norm running statistics.
inline constexpr char kCheckpointMagic[8] = {'D', 'C', 'R', 'M', 'C', 'K', 'P', 'T'};

void write_checkpoint(const Model& model, const std::filesystem::path& path);
/// Throws FormatError on malformed files.
Model read_checkpoint(const std::filesystem::path& path);

}  // namespace dcrm
