#pragma once

#include <array>

#include "vspc/morton.hpp"

namespace vspc {

/// Index of a 27-neighborhood offset d in {-1,0,1}^3.
constexpr int offset_index(int dx, int dy, int dz) { return (dx + 1) + 3 * (dy + 1) + 9 * (dz + 1); }
constexpr int offset_index(const Coord& d) { return offset_index(d[0], d[1], d[2]); }
constexpr Coord offset_from_index(int k) { return {k % 3 - 1, (k / 3) % 3 - 1, k / 9 - 1}; }
/// Index of -d.
constexpr int reciprocal_offset(int k) { return 26 - k; }
inline constexpr int kSelfOffset = offset_index(0, 0, 0);
inline constexpr int kNeighborhood = 27;

/// Two-scale refinement weights of the order-p tensor-product B-spline:
/// phi_{l,n} = sum_d w_d phi_{l+1,2n+d}, d in {-1,0,1}^3.
struct BsplineKernel {
  int order = 1;
  std::array<double, kNeighborhood> weights{};

  double weight(const Coord& d) const { return weights[static_cast<std::size_t>(offset_index(d))]; }
};

/// p=1: box refinement, weight 1 on {0,1}^3. p=2: hat refinement,
/// prod_axis (1/2)^{|d_axis|}. Throws std::invalid_argument otherwise.
BsplineKernel build_kernel(int order);

/// phi_{0,0} evaluated at x (box on [0,1) per axis, or hat on (-1,1)).
double bspline_basis_1d(int order, double x);
double bspline_basis(int order, double x, double y, double z);

}  // namespace vspc
