#include "vspc/polyop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vspc {

namespace {

double exponent_of(PolyTarget target) {
  switch (target) {
    case PolyTarget::kInverse: return -1.0;
    case PolyTarget::kSqrt: return 0.5;
    case PolyTarget::kInvSqrt: return -0.5;
  }
  return 0.0;
}

}  // namespace

double spectral_upper_bound(const LevelGraph& graph) {
  double mu = 0.0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    double row = 0.0;
    for (int k = 0; k < kNeighborhood; ++k) row += std::abs(graph.gram_at(i, k));
    mu = std::max(mu, row);
  }
  return std::max(mu, 1e-12);
}

PolySpec build_polyspec(PolyTarget target, int degree, double mu) {
  if (degree < 1) throw std::invalid_argument("build_polyspec: degree must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("build_polyspec: mu must be positive");
  const double alpha = exponent_of(target);
  const double x0 = PolySpec::kExpansionPoint;
  PolySpec spec;
  spec.target = target;
  spec.degree = degree;
  spec.mu = mu;
  spec.scale = std::pow(2.0 * mu, alpha);
  spec.coefficients.resize(static_cast<std::size_t>(degree) + 1);
  // b_k = binom(alpha, k) x0^(alpha - k), by recurrence.
  spec.coefficients[0] = std::pow(x0, alpha);
  for (int k = 1; k <= degree; ++k) {
    spec.coefficients[static_cast<std::size_t>(k)] =
        spec.coefficients[static_cast<std::size_t>(k - 1)] * (alpha - k + 1) / (k * x0);
  }
  return spec;
}

double evaluate_poly(const PolySpec& spec, double x) {
  const double t = x / (2.0 * spec.mu) - PolySpec::kExpansionPoint;
  double y = spec.coefficients.back();
  for (int k = spec.degree - 1; k >= 0; --k) y = spec.coefficients[static_cast<std::size_t>(k)] + t * y;
  return spec.scale * y;
}

Signal apply_poly(const PolySpec& spec, const LevelGraph& graph, const Signal& v) {
  if (v.rows() != graph.size()) throw std::invalid_argument("apply_poly: length mismatch");
  const double bound = spectral_upper_bound(graph);
  if (bound > spec.mu * (1.0 + 1e-12)) {
    throw std::invalid_argument("apply_poly: stale mu (" + std::to_string(spec.mu) + " < bound " +
                                std::to_string(bound) + ")");
  }
  const double inv_two_mu = 1.0 / (2.0 * spec.mu);
  const double x0 = PolySpec::kExpansionPoint;
  const auto src = v.data();

  Signal y(v.rows(), v.channels());
  {
    const double b = spec.coefficients.back();
    auto dst = y.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = b * src[i];
  }
  for (int k = spec.degree - 1; k >= 0; --k) {
    const double b = spec.coefficients[static_cast<std::size_t>(k)];
    const Signal xy = apply_gram(graph, y);
    auto dst = y.data();
    const auto g = xy.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = b * src[i] + (g[i] * inv_two_mu - x0 * dst[i]);
  }
  for (double& value : y.data()) value *= spec.scale;
  return y;
}

GramFunctions::GramFunctions(const LevelGraph& graph, int degree, Preconditioning preconditioning)
    : graph_(&graph), preconditioning_(preconditioning), diagonal_(graph.gram_is_diagonal()) {
  const std::size_t n = graph.size();
  if (preconditioning_ == Preconditioning::kJacobi) {
    sqrt_diag_.resize(n);
    inv_sqrt_diag_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = graph.gram_at(i, kSelfOffset);
      if (!(d > 0.0)) throw std::domain_error("GramFunctions: non-positive Gram diagonal");
      sqrt_diag_[i] = std::sqrt(d);
      inv_sqrt_diag_[i] = 1.0 / sqrt_diag_[i];
    }
  }
  if (preconditioning_ == Preconditioning::kJacobi && !diagonal_) {
    normalized_.level = graph.level;
    normalized_.keys = graph.keys;
    normalized_.coords = graph.coords;
    normalized_.neighbors = graph.neighbors;
    normalized_.gram.assign(graph.gram.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < kNeighborhood; ++k) {
        const std::int32_t j = graph.neighbor(i, k);
        if (j < 0) continue;
        normalized_.gram[i * kNeighborhood + static_cast<std::size_t>(k)] =
            k == kSelfOffset ? 1.0 : graph.gram_at(i, k) * inv_sqrt_diag_[i] * inv_sqrt_diag_[static_cast<std::size_t>(j)];
      }
    }
  }
  // A diagonal Gram normalizes to the identity exactly.
  const bool identity = preconditioning_ == Preconditioning::kJacobi && diagonal_;
  const double mu = identity ? 1.0 : spectral_upper_bound(operand());
  inverse_ = build_polyspec(PolyTarget::kInverse, degree, mu);
  sqrt_ = build_polyspec(PolyTarget::kSqrt, degree, mu);
  inv_sqrt_ = build_polyspec(PolyTarget::kInvSqrt, degree, mu);
}

Signal GramFunctions::apply(const PolySpec& spec, const Signal& v) const {
  if (!diagonal_) return apply_poly(spec, operand(), v);
  if (v.rows() != graph_->size()) throw std::invalid_argument("GramFunctions: length mismatch");
  const bool identity = preconditioning_ == Preconditioning::kJacobi;
  const double unit = evaluate_poly(spec, 1.0);
  Signal out = v;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const double f = identity ? unit : evaluate_poly(spec, graph_->gram_at(i, kSelfOffset));
    for (double& value : out.row(i)) value *= f;
  }
  return out;
}

Signal GramFunctions::scale_rows(const Signal& v, const std::vector<double>& factors) const {
  Signal out = v;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (double& value : out.row(i)) value *= factors[i];
  }
  return out;
}

Signal GramFunctions::inverse(const Signal& v) const {
  if (preconditioning_ == Preconditioning::kNone) return apply(inverse_, v);
  return scale_rows(apply(inverse_, scale_rows(v, inv_sqrt_diag_)), inv_sqrt_diag_);
}

Signal GramFunctions::solve(const Signal& b, const Signal& guess) const {
  if (diagonal_) return inverse(b);
  if (guess.rows() != b.rows() || guess.channels() != b.channels()) {
    throw std::invalid_argument("GramFunctions::solve: guess shape mismatch");
  }
  Signal r = apply_gram(*graph_, guess);
  auto rd = r.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < rd.size(); ++i) rd[i] = bd[i] - rd[i];
  Signal out = inverse(r);
  auto od = out.data();
  const auto gd = guess.data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] += gd[i];
  return out;
}

Signal GramFunctions::orthonormalize(const Signal& v) const {
  if (preconditioning_ == Preconditioning::kNone) return apply(sqrt_, v);
  return apply(sqrt_, scale_rows(v, sqrt_diag_));
}

Signal GramFunctions::deorthonormalize(const Signal& v) const {
  if (preconditioning_ == Preconditioning::kNone) return apply(inv_sqrt_, v);
  return scale_rows(apply(inv_sqrt_, v), inv_sqrt_diag_);
}

std::vector<GramFunctions> build_gram_functions(const Hierarchy& hierarchy, int degree,
                                                Preconditioning preconditioning) {
  std::vector<GramFunctions> out;
  out.reserve(hierarchy.graphs.size());
  for (const auto& g : hierarchy.graphs) out.emplace_back(g, degree, preconditioning);
  return out;
}

}  // namespace vspc
