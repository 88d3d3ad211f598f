#pragma once

#include <array>
#include <cstdint>

namespace vspc {

using Rgb8 = std::array<std::uint8_t, 3>;
using Color3 = std::array<double, 3>;

// BT.601 full range, chroma offset by 128. Output is not clamped.
Color3 rgb_to_yuv(const Rgb8& rgb);
Color3 rgb_to_yuv(const Color3& rgb);

// Exact inverse of rgb_to_yuv (unclamped).
Color3 yuv_to_rgb(const Color3& yuv);

// Rounds and clamps to [0, 255]; used only at RGB export.
Rgb8 to_rgb8(const Color3& rgb);

}  // namespace vspc
