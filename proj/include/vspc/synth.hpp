#pragma once

#include <cstdint>
#include <string_view>

#include "vspc/point_cloud.hpp"

namespace vspc {

enum class SynthKind { kSolidGradient, kChecker, kPlane, kNoise, kShell };

std::string_view synth_name(SynthKind kind);
/// solid_gradient, checker, plane, noise, shell; throws ConfigError otherwise.
SynthKind parse_synth(std::string_view name);

/// Smallest depth whose grid holds `size` voxels per axis.
int depth_for_size(int size);

/// Deterministic test clouds on a size^3 grid (size in [1, 128]) at
/// depth_for_size(size):
///   solid_gradient  every voxel; Y = 255 x/(s-1), U = 64 + 128 y/(s-1), V = 64 + 128 z/(s-1)
///   checker         every voxel; Y = 255 ((x+y+z) mod 2), U = V = 128
///   plane           the z = 0 slab, smooth sinusoidal colors
///   noise           every voxel, uniform random YUV in [0, 255]
///   shell           voxels within half a voxel of the inscribed sphere, smooth colors
/// `seed` only affects noise.
VoxelCloud synth_cloud(SynthKind kind, int size, std::uint64_t seed = 42);

}  // namespace vspc
