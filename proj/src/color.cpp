#include "vspc/color.hpp"

#include <algorithm>
#include <cmath>

namespace vspc {

namespace {

constexpr double kForward[3][3] = {
    {0.299, 0.587, 0.114},
    {-0.168736, -0.331264, 0.5},
    {0.5, -0.418688, -0.081312},
};

// Inverse of kForward computed once from its cofactors so that the
// composition is the identity up to rounding (the textbook 1.402 / 1.772
// constants are only 4-digit approximations of this matrix's inverse).
struct Inverse {
  double m[3][3];
  constexpr Inverse() : m{} {
    const auto& a = kForward;
    const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
    const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
    const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
    const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
    m[0][0] = c00 / det;
    m[1][0] = c01 / det;
    m[2][0] = c02 / det;
    m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  }
};

constexpr Inverse kInverse{};

}  // namespace

Color3 rgb_to_yuv(const Color3& rgb) {
  Color3 out{};
  for (int r = 0; r < 3; ++r) {
    out[r] = kForward[r][0] * rgb[0] + kForward[r][1] * rgb[1] + kForward[r][2] * rgb[2];
  }
  out[1] += 128.0;
  out[2] += 128.0;
  return out;
}

Color3 rgb_to_yuv(const Rgb8& rgb) {
  return rgb_to_yuv(Color3{static_cast<double>(rgb[0]), static_cast<double>(rgb[1]),
                           static_cast<double>(rgb[2])});
}

Color3 yuv_to_rgb(const Color3& yuv) {
  const double y = yuv[0];
  const double u = yuv[1] - 128.0;
  const double v = yuv[2] - 128.0;
  Color3 out{};
  for (int r = 0; r < 3; ++r) {
    out[r] = kInverse.m[r][0] * y + kInverse.m[r][1] * u + kInverse.m[r][2] * v;
  }
  return out;
}

Rgb8 to_rgb8(const Color3& rgb) {
  Rgb8 out{};
  for (int c = 0; c < 3; ++c) {
    out[c] = static_cast<std::uint8_t>(std::clamp(std::round(rgb[c]), 0.0, 255.0));
  }
  return out;
}

}  // namespace vspc
