#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vspc/hierarchy.hpp"
#include "vspc/polyop.hpp"
#include "vspc/signal.hpp"

namespace vspc {

/// Space-invariant 27-neighborhood weights, w[offset_index(k)] >= 0.
struct LlwaWeights {
  std::array<double, kNeighborhood> w{};
};

/// w_k = exp(-|k|^2 / (2 sigma^2)); the G-PCC-like baseline uses sigma = 0.5.
LlwaWeights gaussian_llwa_weights(double sigma = 0.5);

struct PbfParams {
  double sigma_x = 0.5;
  double sigma_y = 64.0;
  std::vector<double> r;  // r_0..r_K

  int stages() const { return static_cast<int>(r.size()) - 1; }
};

/// r_0 = 1, r_k = 0.5 for k = 1..K.
PbfParams default_pbf_params(int stages = 20);

enum class PredictorKind : std::uint8_t { kNone = 0, kBaselineLlwa = 1, kLlwaFull = 2, kPbf = 3 };

std::string_view predictor_name(PredictorKind kind);
/// Accepts none, baseline_llwa, llwa_full, pbf.
PredictorKind parse_predictor(std::string_view name);

struct PredictorParams {
  PredictorKind kind = PredictorKind::kPbf;
  LlwaWeights llwa = gaussian_llwa_weights();
  PbfParams pbf = default_pbf_params();
};

/// y[i] = sum_j w_{k_ij} x[j] / sum_j w_{k_ij} over present neighbors j
/// (including i itself). Requires w at the self offset > 0.
Signal llwa(const LlwaWeights& weights, const LevelGraph& graph, const Signal& x);

/// Per-edge bilateral weights and their row sums, frozen from one signal.
struct BilateralWeights {
  std::vector<double> w;       // size * 27, 0 for absent neighbors
  std::vector<double> degree;  // row sums
};

/// exp(-|n_i - n_j|^2 / (2 sx^2)) * exp(-|x_i - x_j|^2 / (2 sy^2)), the
/// signal distance taken over all channels.
BilateralWeights bf_weights(const PbfParams& params, const LevelGraph& graph, const Signal& x);

/// D_x^{-1} W_x v with frozen weights.
Signal bf_stage(const BilateralWeights& weights, const LevelGraph& graph, const Signal& v);

Signal bf(const PbfParams& params, const LevelGraph& graph, const Signal& x);

/// r_0 prod_{k=1..K} ((1 - r_k) I + r_k D_x^{-1} W_x) x, weights from x.
Signal pbf(const PbfParams& params, const LevelGraph& graph, const Signal& x);

/// Prediction of level-(l+1) coefficients from level-l coefficients.
///   none:          A_l^T F
///   baseline_llwa: LLWA(A_l^T F) on level l+1
///   llwa_full/pbf: X_{l+1}^{-1} A_{l+1}..A_{L-1} E(A_{L-1}^T..A_l^T F),
///                  E = LLWA or PBF on the finest level. The inverse is
///                  a GramFunctions::solve started from A_l^T F.
/// `functions` is indexed by level - l0.
Signal predict(const PredictorParams& params, const Hierarchy& hierarchy, const std::vector<GramFunctions>& functions,
               int level, const Signal& coarse);

}  // namespace vspc
