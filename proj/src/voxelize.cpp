#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "vspc/point_cloud.hpp"

namespace vspc {

std::vector<MortonKey> VoxelCloud::keys() const {
  std::vector<MortonKey> out;
  out.reserve(voxels.size());
  for (const auto& v : voxels) out.push_back(v.key);
  return out;
}

VoxelCloud voxelize(const RawPointCloud& cloud, int depth) {
  if (depth < 1 || depth > kMortonBits) throw std::invalid_argument("voxelize: depth must be in [1, 21]");
  if (cloud.empty()) throw std::invalid_argument("voxelize: empty point cloud");

  std::array<double, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = hi[a] = cloud.front().position[a];
  }
  for (const auto& p : cloud) {
    for (int a = 0; a < 3; ++a) {
      if (!std::isfinite(p.position[a])) throw std::invalid_argument("voxelize: non-finite position");
      lo[a] = std::min(lo[a], p.position[a]);
      hi[a] = std::max(hi[a], p.position[a]);
    }
  }
  const double extent_max = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  const std::int64_t grid_max = (std::int64_t{1} << depth) - 1;
  const auto grid = static_cast<double>(grid_max);
  // (x - lo) * G / extent_max, evaluated in this order so that the longest
  // axis lands exactly on G and integer clouds spanning [0, G] map to themselves.
  auto scaled = [&](double d) { return extent_max > 0 ? d * grid / extent_max : 0.0; };

  std::array<std::int64_t, 3> offset{};
  std::array<std::int64_t, 3> span{};
  for (int a = 0; a < 3; ++a) {
    const double extent = hi[a] - lo[a];
    span[a] = extent == extent_max ? grid_max : static_cast<std::int64_t>(std::floor(scaled(extent)));
    if (extent == 0) span[a] = 0;
    offset[a] = span[a] > 0 ? (grid_max - span[a]) / 2 : 0;
  }

  std::vector<MortonKey> point_keys(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::array<std::int64_t, 3> c{};
    for (int a = 0; a < 3; ++a) {
      if (span[a] == 0) {
        c[a] = offset[a];
        continue;
      }
      const auto f = static_cast<std::int64_t>(std::floor(scaled(cloud[i].position[a] - lo[a])));
      c[a] = offset[a] + std::clamp<std::int64_t>(f, 0, span[a]);
    }
    point_keys[i] = morton_encode(c[0], c[1], c[2]);
  }

  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return point_keys[a] < point_keys[b]; });

  VoxelCloud out;
  out.depth = depth;
  std::size_t i = 0;
  while (i < order.size()) {
    const MortonKey key = point_keys[order[i]];
    Color3 sum{};
    std::size_t n = 0;
    for (; i < order.size() && point_keys[order[i]] == key; ++i, ++n) {
      const Color3 yuv = rgb_to_yuv(cloud[order[i]].color);
      for (int c = 0; c < 3; ++c) sum[c] += yuv[c];
    }
    Voxel v;
    v.key = key;
    for (int c = 0; c < 3; ++c) v.attr[c] = sum[c] / static_cast<double>(n);
    out.voxels.push_back(v);
  }
  return out;
}

void write_voxel_csv(std::ostream& os, const VoxelCloud& cloud) {
  os << "morton,x,y,z,Y,U,V\n";
  char buf[160];
  for (const auto& v : cloud.voxels) {
    const Coord c = morton_decode(v.key);
    std::snprintf(buf, sizeof(buf), "%llu,%d,%d,%d,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(v.key), c[0],
                  c[1], c[2], v.attr[0], v.attr[1], v.attr[2]);
    os << buf;
  }
}

RawPointCloud to_raw(const VoxelCloud& cloud) {
  RawPointCloud out;
  out.reserve(cloud.size());
  for (const auto& v : cloud.voxels) {
    const Coord c = morton_decode(v.key);
    RawPoint p;
    p.position = {static_cast<double>(c[0]), static_cast<double>(c[1]), static_cast<double>(c[2])};
    p.color = to_rgb8(yuv_to_rgb(v.attr));
    out.push_back(p);
  }
  return out;
}

}  // namespace vspc
