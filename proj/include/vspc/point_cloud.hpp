#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vspc/color.hpp"
#include "vspc/morton.hpp"

namespace vspc {

struct RawPoint {
  std::array<double, 3> position{};
  Rgb8 color{};
};

/// Points in file order.
using RawPointCloud = std::vector<RawPoint>;

struct Voxel {
  MortonKey key = 0;
  Color3 attr{};  // Y, U, V
};

/// Voxelized cloud on a 2^depth grid, strictly increasing Morton keys.
struct VoxelCloud {
  int depth = 0;
  std::vector<Voxel> voxels;

  std::size_t size() const { return voxels.size(); }
  std::vector<MortonKey> keys() const;
};

/// Normalizes positions into [0, 2^depth)^3 with one uniform scale (the
/// longest bounding-box axis spans the grid; other axes are centered),
/// floors to voxel coordinates and averages the YUV colors per voxel.
/// Axes on which all points coincide map to 0. Requires depth in [1, 21].
VoxelCloud voxelize(const RawPointCloud& cloud, int depth);

/// CSV dump with columns morton,x,y,z,Y,U,V.
void write_voxel_csv(std::ostream& os, const VoxelCloud& cloud);

/// Converts a voxel cloud to raw points at integer positions with RGB8
/// colors (rounded and clamped).
RawPointCloud to_raw(const VoxelCloud& cloud);

}  // namespace vspc
