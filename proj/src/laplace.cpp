#include "vspc/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vspc {

double laplace_cdf(double x, double m, double b) {
  const double z = (x - m) / b;
  return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
}

double laplace_mass(double y, const LaplaceModel& model) {
  const double lo = y - 0.5 * model.delta;
  const double hi = y + 0.5 * model.delta;
  const double m = model.m;
  const double b = model.b;
  // Use the lower tail on the left of m and the upper tail on the right so
  // mass far from m is not lost to cancellation.
  double mass;
  if (hi <= m) {
    mass = 0.5 * (std::exp((hi - m) / b) - std::exp((lo - m) / b));
  } else if (lo >= m) {
    mass = 0.5 * (std::exp(-(lo - m) / b) - std::exp(-(hi - m) / b));
  } else {
    mass = 1.0 - 0.5 * std::exp((lo - m) / b) - 0.5 * std::exp(-(hi - m) / b);
  }
  return std::max(mass, kLaplaceMassFloor);
}

double rate_proxy(std::span<const double> y, const LaplaceModel& model) {
  double bits = 0.0;
  for (const double v : y) bits -= std::log2(laplace_mass(v, model));
  return bits;
}

LaplaceModel fit_laplace(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("fit_laplace: empty input");
  std::vector<double> s(y.begin(), y.end());
  const std::size_t n = s.size();
  std::nth_element(s.begin(), s.begin() + n / 2, s.end());
  double m = s[n / 2];
  if (n % 2 == 0) {
    const double lo = *std::max_element(s.begin(), s.begin() + n / 2);
    m = 0.5 * (lo + m);
  }
  double sum = 0.0;
  for (const double v : y) sum += std::abs(v - m);
  LaplaceModel out;
  out.m = m;
  out.b = std::max(sum / static_cast<double>(n), kLaplaceScaleFloor);
  out.delta = 1.0;
  return out;
}

}  // namespace vspc
