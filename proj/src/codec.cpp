#include "vspc/codec.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vspc/errors.hpp"
#include "vspc/rlgr.hpp"

namespace vspc {

void validate(const CodecConfig& c, int depth) {
  if (c.order != 1 && c.order != 2) throw ConfigError("p must be 1 or 2");
  if (c.l0 < 0 || c.l0 >= depth) {
    throw ConfigError("l0 must be in [0, " + std::to_string(depth) + "), got " + std::to_string(c.l0));
  }
  if (!(c.delta > 0.0) || !std::isfinite(c.delta)) throw ConfigError("delta must be positive and finite");
  if (c.poly_degree < 1) throw ConfigError("polynomial degree must be >= 1");
  const auto& pr = c.predictor;
  if (pr.kind == PredictorKind::kBaselineLlwa || pr.kind == PredictorKind::kLlwaFull) {
    for (const double w : pr.llwa.w) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("LLWA weights must be finite and >= 0");
    }
    if (!(pr.llwa.w[kSelfOffset] > 0.0)) throw ConfigError("LLWA self weight must be positive");
  } else if (pr.kind == PredictorKind::kPbf) {
    if (pr.pbf.r.empty()) throw ConfigError("PBF needs r_0");
    if (!(pr.pbf.sigma_x > 0.0) || !(pr.pbf.sigma_y > 0.0)) throw ConfigError("PBF sigmas must be positive");
    for (const double r : pr.pbf.r) {
      if (!std::isfinite(r)) throw ConfigError("PBF gains must be finite");
    }
  }
}

std::int64_t quantize(double v, double delta) {
  const double x = std::round(v / delta);
  constexpr double kLimit = 9.0e18;
  if (!(std::abs(x) < kLimit)) throw ConfigError("quantize: coefficient out of integer range");
  return static_cast<std::int64_t>(x);
}

double dequantize(std::int64_t q, double delta) { return static_cast<double>(q) * delta; }

std::vector<std::int64_t> quantize(std::span<const double> v, double delta) {
  std::vector<std::int64_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = quantize(v[i], delta);
  return out;
}

std::vector<double> dequantize(std::span<const std::int64_t> q, double delta) {
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = dequantize(q[i], delta);
  return out;
}

CodecContext::CodecContext(std::span<const MortonKey> keys, int depth, int order, int l0, int poly_degree,
                           Preconditioning preconditioning)
    : hierarchy_(std::make_unique<Hierarchy>(build_hierarchy(keys, depth, order, l0))),
      poly_degree_(poly_degree),
      preconditioning_(preconditioning) {
  functions_ = build_gram_functions(*hierarchy_, poly_degree, preconditioning);
}

const GramFunctions& CodecContext::functions(int level) const {
  return functions_.at(static_cast<std::size_t>(level - l0()));
}

bool CodecContext::matches(const CodecConfig& c) const {
  return c.order == order() && c.l0 == l0() && c.poly_degree == poly_degree_ && c.preconditioning == preconditioning_;
}

CodecContext make_context(const VoxelCloud& cloud, const CodecConfig& config) {
  validate(config, cloud.depth);
  return CodecContext(cloud.keys(), cloud.depth, config.order, config.l0, config.poly_degree, config.preconditioning);
}

Signal attributes(const VoxelCloud& cloud) {
  Signal s(cloud.size(), kChannels);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t c = 0; c < kChannels; ++c) s(i, c) = cloud.voxels[i].attr[c];
  }
  return s;
}

void set_attributes(VoxelCloud& cloud, const Signal& attrs) {
  if (attrs.rows() != cloud.size() || attrs.channels() != kChannels) {
    throw std::invalid_argument("set_attributes: shape mismatch");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t c = 0; c < kChannels; ++c) cloud.voxels[i].attr[c] = attrs(i, c);
  }
}

CoeffPyramid analyze(const CodecContext& context, const Signal& attrs) {
  const Hierarchy& h = context.hierarchy();
  if (attrs.rows() != context.voxel_count()) throw std::invalid_argument("analyze: attribute count does not match geometry");
  const std::size_t levels = h.graphs.size();
  CoeffPyramid out;
  out.l0 = h.l0;
  out.unnormalized.resize(levels);
  out.lowpass.resize(levels);
  out.residual.resize(levels);
  out.orthonormal.resize(levels);
  out.unnormalized[levels - 1] = attrs;
  for (int l = h.depth - 1; l >= h.l0; --l) {
    const auto i = static_cast<std::size_t>(l - h.l0);
    out.unnormalized[i] = apply_A(h.link(l), out.unnormalized[i + 1]);
  }
  out.lowpass[levels - 1] = context.functions()[levels - 1].inverse(out.unnormalized[levels - 1]);
  for (int l = h.depth - 1; l >= h.l0; --l) {
    const auto i = static_cast<std::size_t>(l - h.l0);
    const TwoScaleLink& link = h.link(l);
    Signal guess = apply_A(link, out.lowpass[i + 1]);
    const Signal mass = apply_A(link, Signal(link.child_count, 1, 1.0));
    for (std::size_t n = 0; n < guess.rows(); ++n) {
      for (double& v : guess.row(n)) v /= mass(n, 0);
    }
    out.lowpass[i] = context.functions()[i].solve(out.unnormalized[i], guess);
  }
  return out;
}

namespace {

Signal add(const Signal& a, const Signal& b) {
  Signal out = a;
  auto o = out.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
  return out;
}

Signal subtract(const Signal& a, const Signal& b) {
  Signal out = a;
  auto o = out.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= y[i];
  return out;
}

struct QuantizedLevel {
  std::array<std::vector<std::int64_t>, kChannels> q;
  Signal dequantized;
};

QuantizedLevel quantize_signal(const Signal& v, double delta) {
  QuantizedLevel out;
  out.dequantized = Signal(v.rows(), v.channels());
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto col = v.column(c);
    out.q[c] = quantize(col, delta);
    out.dequantized.set_column(c, dequantize(out.q[c], delta));
  }
  return out;
}

Signal dequantize_chunks(const std::array<std::vector<std::int64_t>, kChannels>& q, double delta) {
  Signal out(q[0].size(), kChannels);
  for (std::size_t c = 0; c < kChannels; ++c) out.set_column(c, dequantize(q[c], delta));
  return out;
}

BitstreamHeader make_header(const CodecContext& ctx, const CodecConfig& config) {
  BitstreamHeader h;
  h.depth = ctx.depth();
  h.l0 = ctx.l0();
  h.order = ctx.order();
  h.delta = config.delta;
  h.predictor = config.predictor;
  h.poly_degree = ctx.poly_degree();
  h.preconditioning = ctx.preconditioning();
  return h;
}

}  // namespace

EncodeResult encode(const CodecContext& ctx, const Signal& attrs, const CodecConfig& config) {
  validate(config, ctx.depth());
  if (!ctx.matches(config)) throw ConfigError("encode: configuration does not match the codec context");
  if (attrs.channels() != kChannels) throw std::invalid_argument("encode: expected 3 attribute channels");
  const Hierarchy& h = ctx.hierarchy();
  const auto& fns = ctx.functions();
  const std::size_t levels = h.graphs.size();

  EncodeResult out;
  out.pyramid = analyze(ctx, attrs);
  CoeffPyramid& pyr = out.pyramid;
  out.reconstructed.resize(levels);
  out.quantized.resize(levels);
  out.levels.resize(levels);

  pyr.orthonormal[0] = fns[0].orthonormalize(pyr.lowpass[0]);
  QuantizedLevel base = quantize_signal(pyr.orthonormal[0], config.delta);
  out.quantized[0] = std::move(base.q);
  out.reconstructed[0] = fns[0].deorthonormalize(base.dequantized);

  for (std::size_t i = 0; i + 1 < levels; ++i) {
    const int level = h.l0 + static_cast<int>(i);
    const Signal& source = config.open_loop ? pyr.lowpass[i] : out.reconstructed[i];
    const Signal pred = predict(config.predictor, h, fns, level, source);
    pyr.residual[i + 1] = subtract(pyr.lowpass[i + 1], pred);
    pyr.orthonormal[i + 1] = fns[i + 1].orthonormalize(pyr.residual[i + 1]);
    QuantizedLevel ql = quantize_signal(pyr.orthonormal[i + 1], config.delta);
    out.quantized[i + 1] = std::move(ql.q);
    const Signal decoder_pred =
        config.open_loop ? predict(config.predictor, h, fns, level, out.reconstructed[i]) : pred;
    out.reconstructed[i + 1] = add(decoder_pred, fns[i + 1].deorthonormalize(ql.dequantized));
  }

  std::vector<std::array<std::vector<std::byte>, kChannels>> chunks(levels);
  out.header = make_header(ctx, config);
  out.header.chunk_lengths.resize(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    LevelStats& st = out.levels[i];
    st.level = h.l0 + static_cast<int>(i);
    st.nodes = h.graphs[i].size();
    for (std::size_t c = 0; c < kChannels; ++c) {
      chunks[i][c] = rlgr_encode(out.quantized[i][c]);
      out.header.chunk_lengths[i][c] = chunks[i][c].size();
      st.bytes[c] = chunks[i][c].size();
      for (const auto q : out.quantized[i][c]) st.nonzero[c] += q != 0 ? 1 : 0;
    }
  }
  out.bitstream = write_bitstream(out.header, chunks);
  std::size_t payload = 0;
  for (const auto& st : out.levels) payload += st.bytes[0] + st.bytes[1] + st.bytes[2];
  out.header_bytes = out.bitstream.size() - payload;
  return out;
}

EncodeResult encode(const VoxelCloud& cloud, const CodecConfig& config) {
  const CodecContext ctx = make_context(cloud, config);
  return encode(ctx, attributes(cloud), config);
}

CodecConfig config_from_header(const BitstreamHeader& header) {
  CodecConfig c;
  c.order = header.order;
  c.l0 = header.l0;
  c.delta = header.delta;
  c.predictor = header.predictor;
  c.poly_degree = header.poly_degree;
  c.preconditioning = header.preconditioning;
  return c;
}

DecodeResult decode(std::span<const std::byte> bitstream, const CodecContext& ctx, int max_level) {
  const ParsedBitstream parsed = parse_bitstream(bitstream);
  const BitstreamHeader& hd = parsed.header;
  const CodecConfig config = config_from_header(hd);
  if (hd.depth != ctx.depth() || !ctx.matches(config)) {
    throw ConfigError("decode: bitstream header does not match the codec context");
  }
  validate(config, hd.depth);
  if (max_level < 0) {
    max_level = hd.depth;
    if (parsed.payload.size() != parsed.declared_payload_bytes) {
      throw FormatError("chunk length mismatch: stream truncated (" + std::to_string(parsed.payload.size()) + " of " +
                        std::to_string(parsed.declared_payload_bytes) + " payload bytes)");
    }
  }
  if (max_level < hd.l0 || max_level > hd.depth) throw ConfigError("decode: max_level outside [l0, L]");

  const Hierarchy& h = ctx.hierarchy();
  const auto& fns = ctx.functions();
  auto read_level = [&](int level) {
    const auto i = static_cast<std::size_t>(level - hd.l0);
    const std::size_t n = h.graphs[i].size();
    std::array<std::vector<std::int64_t>, kChannels> q;
    for (std::size_t c = 0; c < kChannels; ++c) {
      const auto bytes = parsed.chunk(level, c);
      std::size_t used = 0;
      q[c] = rlgr_decode(bytes, n, &used);
      if (used != bytes.size()) {
        throw FormatError("chunk length mismatch: level " + std::to_string(level) + " channel " + std::to_string(c));
      }
    }
    return dequantize_chunks(q, hd.delta);
  };

  Signal rec = fns[0].deorthonormalize(read_level(hd.l0));
  for (int level = hd.l0; level < max_level; ++level) {
    const auto i = static_cast<std::size_t>(level - hd.l0);
    const Signal pred = predict(config.predictor, h, fns, level, rec);
    rec = add(pred, fns[i + 1].deorthonormalize(read_level(level + 1)));
  }

  DecodeResult out;
  out.header = hd;
  out.decoded_level = max_level;
  out.coefficients = rec;
  for (int level = max_level; level < hd.depth; ++level) rec = predict(config.predictor, h, fns, level, rec);
  out.attributes = std::move(rec);
  return out;
}

DecodeResult decode(std::span<const std::byte> bitstream, std::span<const MortonKey> keys, int max_level) {
  const ParsedBitstream parsed = parse_bitstream(bitstream);
  const CodecConfig config = config_from_header(parsed.header);
  validate(config, parsed.header.depth);
  if (keys.empty()) throw ConfigError("decode: empty geometry");
  const CodecContext ctx(keys, parsed.header.depth, config.order, config.l0, config.poly_degree,
                         config.preconditioning);
  return decode(bitstream, ctx, max_level);
}

}  // namespace vspc
