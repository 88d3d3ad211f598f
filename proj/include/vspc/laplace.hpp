#pragma once

#include <span>

namespace vspc {

struct LaplaceModel {
  double m = 0.0;
  double b = 1.0;
  double delta = 1.0;
};

inline constexpr double kLaplaceMassFloor = 1e-12;
inline constexpr double kLaplaceScaleFloor = 1e-6;

double laplace_cdf(double x, double m, double b);

/// Probability of the quantization cell [y - delta/2, y + delta/2].
double laplace_mass(double y, const LaplaceModel& model);

/// Sum over Y of -log2 of the cell mass; masses are floored at 1e-12.
double rate_proxy(std::span<const double> y, const LaplaceModel& model);

/// Maximum-likelihood fit: m = median, b = mean |y - m| (floored). Throws
/// std::invalid_argument on empty input. `delta` of the result is 1.
LaplaceModel fit_laplace(std::span<const double> y);

}  // namespace vspc
