#include "vspc/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace vspc {

BsplineKernel build_kernel(int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("build_kernel: order must be 1 or 2");
  BsplineKernel kernel;
  kernel.order = order;
  for (int k = 0; k < kNeighborhood; ++k) {
    const Coord d = offset_from_index(k);
    double w = 1.0;
    for (int a = 0; a < 3; ++a) {
      if (order == 1) {
        w *= d[a] >= 0 ? 1.0 : 0.0;
      } else {
        w *= d[a] == 0 ? 1.0 : 0.5;
      }
    }
    kernel.weights[static_cast<std::size_t>(k)] = w;
  }
  return kernel;
}

double bspline_basis_1d(int order, double x) {
  if (order == 1) return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  const double a = std::abs(x);
  return a < 1.0 ? 1.0 - a : 0.0;
}

double bspline_basis(int order, double x, double y, double z) {
  return bspline_basis_1d(order, x) * bspline_basis_1d(order, y) * bspline_basis_1d(order, z);
}

}  // namespace vspc
