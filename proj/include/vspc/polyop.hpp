#pragma once

#include <vector>

#include "vspc/hierarchy.hpp"
#include "vspc/signal.hpp"

namespace vspc {

enum class PolyTarget { kInverse, kSqrt, kInvSqrt };

/// Degree-P Taylor polynomial of x^alpha about x0 = 1/2 in the normalized
/// variable X / (2 mu), with the output scale c = (2 mu)^alpha folded in so
/// that apply_poly approximates f(X) v.
struct PolySpec {
  PolyTarget target = PolyTarget::kInverse;
  int degree = 0;
  std::vector<double> coefficients;  // b_0..b_P
  double scale = 1.0;               // c
  double mu = 1.0;
  static constexpr double kExpansionPoint = 0.5;
};

/// Gershgorin bound max_i sum_k |gram(i,k)|, floored at 1e-12.
double spectral_upper_bound(const LevelGraph& graph);

/// Throws std::invalid_argument unless degree >= 1 and mu > 0.
PolySpec build_polyspec(PolyTarget target, int degree, double mu);

/// Scalar evaluation c * p(x / (2 mu)).
double evaluate_poly(const PolySpec& spec, double x);

/// Horner evaluation with exactly `degree` Gram applications. Throws
/// std::invalid_argument if the graph's bound exceeds spec.mu.
Signal apply_poly(const PolySpec& spec, const LevelGraph& graph, const Signal& v);

enum class Preconditioning : std::uint8_t { kNone = 0, kJacobi = 1 };

/// X^{-1} and an orthonormalizing factor pair (S, S^{-1}) with S^T S = X
/// for one level's Gram operator X, all as degree-P polynomials.
///
/// kNone uses the polynomials of X directly (S = X^{1/2}). kJacobi applies
/// them to M = D^{-1/2} X D^{-1/2} (D = diag X), which is far better
/// conditioned: X^{-1} = D^{-1/2} M^{-1} D^{-1/2}, S = M^{1/2} D^{1/2},
/// S^{-1} = D^{-1/2} M^{-1/2}. Diagonal Grams (every p=1 level) are
/// evaluated per node.
class GramFunctions {
 public:
  GramFunctions(const LevelGraph& graph, int degree, Preconditioning preconditioning);

  Signal inverse(const Signal& v) const;
  /// X^{-1} b computed as guess + p_inv(X)(b - X guess). Identical to
  /// inverse(b) in exact arithmetic, but the truncation error of the series
  /// only acts on b - X guess, so a guess that is exact for some inputs
  /// (constants, say) keeps them exact. Diagonal Grams ignore the guess.
  Signal solve(const Signal& b, const Signal& guess) const;
  Signal orthonormalize(const Signal& v) const;
  Signal deorthonormalize(const Signal& v) const;

  const LevelGraph& graph() const { return *graph_; }
  /// The operator the polynomials act on (X, or M under kJacobi). Not
  /// materialized for a diagonal Gram under kJacobi (M = I).
  const LevelGraph& operand() const {
    return preconditioning_ == Preconditioning::kJacobi && !diagonal_ ? normalized_ : *graph_;
  }
  double mu() const { return inverse_.mu; }
  bool diagonal() const { return diagonal_; }

 private:
  Signal apply(const PolySpec& spec, const Signal& v) const;
  Signal scale_rows(const Signal& v, const std::vector<double>& factors) const;

  const LevelGraph* graph_;
  Preconditioning preconditioning_;
  LevelGraph normalized_;
  std::vector<double> sqrt_diag_;
  std::vector<double> inv_sqrt_diag_;
  bool diagonal_ = false;
  PolySpec inverse_;
  PolySpec sqrt_;
  PolySpec inv_sqrt_;
};

/// One GramFunctions per hierarchy level (index l - l0). The hierarchy
/// must outlive the result.
std::vector<GramFunctions> build_gram_functions(const Hierarchy& hierarchy, int degree,
                                                Preconditioning preconditioning);

}  // namespace vspc
