#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace vspc {

using MortonKey = std::uint64_t;

// 21 bits per axis; 63-bit keys.
inline constexpr int kMortonBits = 21;
inline constexpr std::int64_t kMortonLimit = std::int64_t{1} << kMortonBits;

namespace detail {

constexpr std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffffULL;
  v = (v | (v << 32)) & 0x1f00000000ffffULL;
  v = (v | (v << 16)) & 0x1f0000ff0000ffULL;
  v = (v | (v << 8)) & 0x100f00f00f00f00fULL;
  v = (v | (v << 4)) & 0x10c30c30c30c30c3ULL;
  v = (v | (v << 2)) & 0x1249249249249249ULL;
  return v;
}

constexpr std::uint64_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x1f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffffULL;
  return v;
}

}  // namespace detail

/// Integer voxel / node coordinate.
using Coord = std::array<std::int32_t, 3>;

/// Interleaves x into bit 0, y into bit 1 and z into bit 2 of every triple.
/// Throws std::out_of_range unless every coordinate is in [0, 2^21).
constexpr MortonKey morton_encode(std::int64_t x, std::int64_t y, std::int64_t z) {
  if (x < 0 || y < 0 || z < 0 || x >= kMortonLimit || y >= kMortonLimit || z >= kMortonLimit) {
    throw std::out_of_range("morton_encode: coordinate outside [0, 2^21)");
  }
  return detail::spread_bits(static_cast<std::uint64_t>(x)) |
         (detail::spread_bits(static_cast<std::uint64_t>(y)) << 1) |
         (detail::spread_bits(static_cast<std::uint64_t>(z)) << 2);
}

constexpr MortonKey morton_encode(const Coord& c) { return morton_encode(c[0], c[1], c[2]); }

constexpr Coord morton_decode(MortonKey key) {
  if (key >> (3 * kMortonBits)) {
    throw std::out_of_range("morton_decode: key exceeds 63 bits");
  }
  return {static_cast<std::int32_t>(detail::compact_bits(key)),
          static_cast<std::int32_t>(detail::compact_bits(key >> 1)),
          static_cast<std::int32_t>(detail::compact_bits(key >> 2))};
}

}  // namespace vspc
