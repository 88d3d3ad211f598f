#include "vspc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "vspc/errors.hpp"

namespace vspc {

std::string_view synth_name(SynthKind kind) {
  switch (kind) {
    case SynthKind::kSolidGradient: return "solid_gradient";
    case SynthKind::kChecker: return "checker";
    case SynthKind::kPlane: return "plane";
    case SynthKind::kNoise: return "noise";
    case SynthKind::kShell: return "shell";
  }
  return "?";
}

SynthKind parse_synth(std::string_view name) {
  for (auto k : {SynthKind::kSolidGradient, SynthKind::kChecker, SynthKind::kPlane, SynthKind::kNoise,
                 SynthKind::kShell}) {
    if (synth_name(k) == name) return k;
  }
  throw ConfigError("unknown synthetic cloud kind '" + std::string(name) + "'");
}

int depth_for_size(int size) {
  int d = 1;
  while ((1 << d) < size) ++d;
  return d;
}

VoxelCloud synth_cloud(SynthKind kind, int size, std::uint64_t seed) {
  if (size < 1 || size > 128) throw ConfigError("synthetic cloud size must be in [1, 128]");
  VoxelCloud out;
  out.depth = depth_for_size(size);
  const double span = size > 1 ? static_cast<double>(size - 1) : 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 255.0);
  const double radius = 0.5 * span;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  const int zmax = kind == SynthKind::kPlane ? 1 : size;
  for (int z = 0; z < zmax; ++z) {
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        const double fx = x / span, fy = y / span, fz = z / span;
        Color3 c{};
        switch (kind) {
          case SynthKind::kSolidGradient:
            c = {255.0 * fx, 64.0 + 128.0 * fy, 64.0 + 128.0 * fz};
            break;
          case SynthKind::kChecker:
            c = {(x + y + z) % 2 == 0 ? 0.0 : 255.0, 128.0, 128.0};
            break;
          case SynthKind::kPlane:
            c = {128.0 + 100.0 * std::sin(kTwoPi * fx) * std::cos(kTwoPi * fy), 128.0 + 40.0 * std::sin(kTwoPi * fy),
                 128.0 + 40.0 * std::cos(kTwoPi * fx)};
            break;
          case SynthKind::kNoise:
            c = {uniform(rng), uniform(rng), uniform(rng)};
            break;
          case SynthKind::kShell: {
            const double r = std::hypot(x - radius, y - radius, z - radius);
            if (std::abs(r - radius) > 0.5) continue;
            c = {40.0 + 180.0 * fz, 128.0 + 50.0 * (fx - 0.5), 128.0 + 50.0 * (fy - 0.5)};
            break;
          }
        }
        out.voxels.push_back({morton_encode(x, y, z), c});
      }
    }
  }
  std::sort(out.voxels.begin(), out.voxels.end(), [](const Voxel& a, const Voxel& b) { return a.key < b.key; });
  return out;
}

}  // namespace vspc
