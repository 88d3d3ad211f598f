#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "vspc/bitstream.hpp"
#include "vspc/hierarchy.hpp"
#include "vspc/point_cloud.hpp"
#include "vspc/polyop.hpp"
#include "vspc/predictors.hpp"
#include "vspc/signal.hpp"

namespace vspc {

struct CodecConfig {
  int order = 2;  // p
  int l0 = 4;
  double delta = 8.0;
  PredictorParams predictor;
  int poly_degree = 100;  // P
  Preconditioning preconditioning = Preconditioning::kJacobi;
  /// Residuals against the prediction from unquantized coefficients. The
  /// decoder is unchanged, so reconstructions drift; for study only.
  bool open_loop = false;
};

/// Throws ConfigError for p outside {1,2}, l0 outside [0, depth), Delta <= 0,
/// P < 1 or malformed predictor parameters.
void validate(const CodecConfig& config, int depth);

/// q = round(v / Delta), halves away from zero.
std::int64_t quantize(double v, double delta);
double dequantize(std::int64_t q, double delta);
std::vector<std::int64_t> quantize(std::span<const double> v, double delta);
std::vector<double> dequantize(std::span<const std::int64_t> q, double delta);

/// Hierarchy and per-level Gram functions for one geometry and (p, l0, P).
class CodecContext {
 public:
  CodecContext(std::span<const MortonKey> keys, int depth, int order, int l0, int poly_degree,
               Preconditioning preconditioning);

  const Hierarchy& hierarchy() const { return *hierarchy_; }
  const std::vector<GramFunctions>& functions() const { return functions_; }
  const GramFunctions& functions(int level) const;
  int depth() const { return hierarchy_->depth; }
  int l0() const { return hierarchy_->l0; }
  int order() const { return hierarchy_->order; }
  int poly_degree() const { return poly_degree_; }
  Preconditioning preconditioning() const { return preconditioning_; }
  std::size_t voxel_count() const { return hierarchy_->graph(depth()).size(); }

  bool matches(const CodecConfig& config) const;

 private:
  std::unique_ptr<Hierarchy> hierarchy_;
  std::vector<GramFunctions> functions_;
  int poly_degree_;
  Preconditioning preconditioning_;
};

CodecContext make_context(const VoxelCloud& cloud, const CodecConfig& config);

/// Indexed by level - l0.
struct CoeffPyramid {
  int l0 = 0;
  std::vector<Signal> unnormalized;   // F~_l
  std::vector<Signal> lowpass;        // F_l
  std::vector<Signal> residual;       // dF_l, empty at l0
  std::vector<Signal> orthonormal;    // S F_l at l0, S dF_l above

  const Signal& lowpass_at(int level) const { return lowpass[static_cast<std::size_t>(level - l0)]; }
};

/// YUV attributes of the voxels as an N x 3 signal.
Signal attributes(const VoxelCloud& cloud);
void set_attributes(VoxelCloud& cloud, const Signal& attrs);

/// Low-pass part of the pyramid: F~_L = attributes, F~_l = A_l F~_{l+1},
/// F_l = X_l^{-1} F~_l. Levels are solved finest first, each started from
/// the A_l-weighted average of F_{l+1} (exact for constant attributes).
CoeffPyramid analyze(const CodecContext& context, const Signal& attrs);

struct LevelStats {
  int level = 0;
  std::size_t nodes = 0;
  std::array<std::size_t, kChannels> bytes{};
  std::array<std::size_t, kChannels> nonzero{};
};

struct EncodeResult {
  std::vector<std::byte> bitstream;
  BitstreamHeader header;
  CoeffPyramid pyramid;
  /// Decoder-side coefficients F^_l, indexed by level - l0.
  std::vector<Signal> reconstructed;
  std::vector<std::array<std::vector<std::int64_t>, kChannels>> quantized;
  std::vector<LevelStats> levels;
  std::size_t header_bytes = 0;

  const Signal& reconstruction() const { return reconstructed.back(); }
  std::size_t total_bits() const { return bitstream.size() * 8; }
};

EncodeResult encode(const CodecContext& context, const Signal& attrs, const CodecConfig& config);
EncodeResult encode(const VoxelCloud& cloud, const CodecConfig& config);

struct DecodeResult {
  BitstreamHeader header;
  int decoded_level = 0;
  /// F^_decoded_level.
  Signal coefficients;
  /// Finest-level attributes: F^_L, or for a partial decode the coefficients
  /// carried up to L by repeated prediction.
  Signal attributes;
};

/// Decodes levels l0..max_level; max_level < 0 means L and requires the
/// complete stream, otherwise only the chunks up to max_level are read.
/// Throws FormatError on bad
/// magic/version, chunk length mismatch or RLGR truncation, ConfigError if
/// `context` disagrees with the header.
DecodeResult decode(std::span<const std::byte> bitstream, const CodecContext& context, int max_level = -1);
/// Builds the context from the header and the geometry keys.
DecodeResult decode(std::span<const std::byte> bitstream, std::span<const MortonKey> keys, int max_level = -1);

CodecConfig config_from_header(const BitstreamHeader& header);

}  // namespace vspc
