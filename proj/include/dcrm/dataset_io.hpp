#pragma once

#include <filesystem>

#include "dcrm/grid.hpp"

namespace dcrm {

/// Binary dataset container, little-endian:
///   "DCRM0001" | u32 case_id | u64 seed | u32 N | u32 C_in | u32 DOF |
///   u8 has_outputs | C_in x (f64 mean, f64 std) |
///   f64 inputs [N, C_in, DOF, DOF] | f64 outputs [N, 1, DOF, DOF] (optional)
inline constexpr char kDatasetMagic[8] = {'D', 'C', 'R', 'M', '0', '0', '0', '1'};

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Throws FormatError with kind kBadMagic, kHeaderMismatch or
/// kTruncatedPayload depending on what is wrong with the file.
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace dcrm
