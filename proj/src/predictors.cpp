#include "vspc/predictors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vspc/errors.hpp"

namespace vspc {

LlwaWeights gaussian_llwa_weights(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_llwa_weights: sigma must be positive");
  LlwaWeights out;
  for (int k = 0; k < kNeighborhood; ++k) {
    const Coord d = offset_from_index(k);
    const double r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    out.w[static_cast<std::size_t>(k)] = std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return out;
}

PbfParams default_pbf_params(int stages) {
  if (stages < 0) throw std::invalid_argument("default_pbf_params: stages must be >= 0");
  PbfParams p;
  p.r.assign(static_cast<std::size_t>(stages) + 1, 0.5);
  p.r[0] = 1.0;
  return p;
}

std::string_view predictor_name(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::kNone: return "none";
    case PredictorKind::kBaselineLlwa: return "baseline_llwa";
    case PredictorKind::kLlwaFull: return "llwa_full";
    case PredictorKind::kPbf: return "pbf";
  }
  return "unknown";
}

PredictorKind parse_predictor(std::string_view name) {
  if (name == "none") return PredictorKind::kNone;
  if (name == "baseline_llwa") return PredictorKind::kBaselineLlwa;
  if (name == "llwa_full") return PredictorKind::kLlwaFull;
  if (name == "pbf") return PredictorKind::kPbf;
  throw ConfigError("unknown predictor '" + std::string(name) + "'");
}

namespace {

// D^{-1} W v for per-edge weights w (size * 27) with row sums `degree`.
Signal normalized_filter(const std::vector<double>& w, const std::vector<double>& degree, const LevelGraph& graph,
                         const Signal& v) {
  if (v.rows() != graph.size()) throw std::invalid_argument("filter: length mismatch");
  ++instrument::sparse_applications();
  const std::size_t nc = v.channels();
  Signal out(graph.size(), nc);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    auto dst = out.row(i);
    for (int k = 0; k < kNeighborhood; ++k) {
      const std::int32_t j = graph.neighbor(i, k);
      const double wk = w[i * kNeighborhood + static_cast<std::size_t>(k)];
      if (j < 0 || wk == 0.0) continue;
      const auto src = v.row(static_cast<std::size_t>(j));
      for (std::size_t c = 0; c < nc; ++c) dst[c] += wk * src[c];
    }
    const double inv = 1.0 / degree[i];
    for (std::size_t c = 0; c < nc; ++c) dst[c] *= inv;
  }
  return out;
}

}  // namespace

Signal llwa(const LlwaWeights& weights, const LevelGraph& graph, const Signal& x) {
  if (!(weights.w[kSelfOffset] > 0.0)) throw std::invalid_argument("llwa: self weight must be positive");
  std::vector<double> w(graph.size() * kNeighborhood, 0.0);
  std::vector<double> degree(graph.size(), 0.0);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (int k = 0; k < kNeighborhood; ++k) {
      if (graph.neighbor(i, k) < 0) continue;
      const double wk = weights.w[static_cast<std::size_t>(k)];
      w[i * kNeighborhood + static_cast<std::size_t>(k)] = wk;
      degree[i] += wk;
    }
  }
  return normalized_filter(w, degree, graph, x);
}

BilateralWeights bf_weights(const PbfParams& params, const LevelGraph& graph, const Signal& x) {
  if (!(params.sigma_x > 0.0) || !(params.sigma_y > 0.0)) {
    throw std::invalid_argument("bf_weights: sigmas must be positive");
  }
  if (x.rows() != graph.size()) throw std::invalid_argument("bf_weights: length mismatch");
  const double inv_sx = 1.0 / (2.0 * params.sigma_x * params.sigma_x);
  const double inv_sy = 1.0 / (2.0 * params.sigma_y * params.sigma_y);
  std::array<double, kNeighborhood> spatial{};
  for (int k = 0; k < kNeighborhood; ++k) {
    const Coord d = offset_from_index(k);
    spatial[static_cast<std::size_t>(k)] = std::exp(-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) * inv_sx);
  }
  BilateralWeights out;
  out.w.assign(graph.size() * kNeighborhood, 0.0);
  out.degree.assign(graph.size(), 0.0);
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const auto xi = x.row(i);
    for (int k = 0; k < kNeighborhood; ++k) {
      const std::int32_t j = graph.neighbor(i, k);
      if (j < 0) continue;
      double w = 1.0;
      if (k != kSelfOffset) {
        const auto xj = x.row(static_cast<std::size_t>(j));
        double dist2 = 0.0;
        for (std::size_t c = 0; c < x.channels(); ++c) dist2 += (xi[c] - xj[c]) * (xi[c] - xj[c]);
        w = spatial[static_cast<std::size_t>(k)] * std::exp(-dist2 * inv_sy);
      }
      out.w[i * kNeighborhood + static_cast<std::size_t>(k)] = w;
      out.degree[i] += w;
    }
  }
  return out;
}

Signal bf_stage(const BilateralWeights& weights, const LevelGraph& graph, const Signal& v) {
  return normalized_filter(weights.w, weights.degree, graph, v);
}

Signal bf(const PbfParams& params, const LevelGraph& graph, const Signal& x) {
  return bf_stage(bf_weights(params, graph, x), graph, x);
}

Signal pbf(const PbfParams& params, const LevelGraph& graph, const Signal& x) {
  if (params.r.empty()) throw std::invalid_argument("pbf: needs at least r_0");
  const BilateralWeights weights = bf_weights(params, graph, x);
  Signal y = x;
  for (std::size_t k = 1; k < params.r.size(); ++k) {
    const double rk = params.r[k];
    const Signal filtered = bf_stage(weights, graph, y);
    auto dst = y.data();
    const auto f = filtered.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (1.0 - rk) * dst[i] + rk * f[i];
  }
  for (double& value : y.data()) value *= params.r[0];
  return y;
}

Signal predict(const PredictorParams& params, const Hierarchy& hierarchy, const std::vector<GramFunctions>& functions,
               int level, const Signal& coarse) {
  if (level < hierarchy.l0 || level >= hierarchy.depth) {
    throw std::out_of_range("predict: level " + std::to_string(level) + " has no finer level");
  }
  if (functions.size() != hierarchy.graphs.size()) throw std::invalid_argument("predict: functions do not match hierarchy");
  const int finest = hierarchy.depth;
  switch (params.kind) {
    case PredictorKind::kNone:
      return apply_At(hierarchy.link(level), coarse);
    case PredictorKind::kBaselineLlwa:
      return llwa(params.llwa, hierarchy.graph(level + 1), apply_At(hierarchy.link(level), coarse));
    case PredictorKind::kLlwaFull:
    case PredictorKind::kPbf: {
      // Plain two-scale upsampling is the starting point of the solve; it
      // is exact for constants.
      const Signal upsampled = apply_At(hierarchy.link(level), coarse);
      Signal x = upsampled;
      for (int m = level + 1; m < finest; ++m) x = apply_At(hierarchy.link(m), x);
      const LevelGraph& top = hierarchy.graph(finest);
      x = params.kind == PredictorKind::kLlwaFull ? llwa(params.llwa, top, x) : pbf(params.pbf, top, x);
      for (int m = finest - 1; m > level; --m) x = apply_A(hierarchy.link(m), x);
      return functions[static_cast<std::size_t>(level + 1 - hierarchy.l0)].solve(x, upsampled);
    }
  }
  throw std::invalid_argument("predict: unknown predictor kind");
}

}  // namespace vspc
