#include "vspc/bitstream.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vspc/errors.hpp"

namespace vspc {

void put_leb128(std::vector<std::byte>& out, std::uint64_t v) {
  do {
    auto byte = static_cast<std::uint8_t>(v & 0x7fu);
    v >>= 7;
    if (v != 0) byte |= 0x80u;
    out.push_back(static_cast<std::byte>(byte));
  } while (v != 0);
}

std::uint64_t get_leb128(std::span<const std::byte> in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) throw FormatError("truncated integer in header");
    const auto byte = std::to_integer<std::uint8_t>(in[pos++]);
    if (shift == 63 && (byte & 0x7eu) != 0) throw FormatError("integer overflow in header");
    v |= static_cast<std::uint64_t>(byte & 0x7fu) << shift;
    if ((byte & 0x80u) == 0) return v;
  }
  throw FormatError("overlong integer in header");
}

void put_f64(std::vector<std::byte>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xffu));
}

double get_f64(std::span<const std::byte> in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw FormatError("truncated float in header");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::to_integer<std::uint64_t>(in[pos + i]) << (8 * i);
  pos += 8;
  return std::bit_cast<double>(bits);
}

namespace {

int get_small(std::span<const std::byte> in, std::size_t& pos, std::uint64_t max, const char* what) {
  const std::uint64_t v = get_leb128(in, pos);
  if (v > max) throw FormatError(std::string("header field out of range: ") + what);
  return static_cast<int>(v);
}

bool is_llwa(PredictorKind k) { return k == PredictorKind::kBaselineLlwa || k == PredictorKind::kLlwaFull; }

}  // namespace

std::vector<std::byte> write_bitstream(const BitstreamHeader& h,
                                       const std::vector<std::array<std::vector<std::byte>, kChannels>>& chunks) {
  if (chunks.size() != static_cast<std::size_t>(h.levels())) {
    throw std::invalid_argument("write_bitstream: chunk count does not match levels");
  }
  std::vector<std::byte> out;
  for (const char c : kMagic) out.push_back(static_cast<std::byte>(c));
  out.push_back(static_cast<std::byte>(kFormatVersion));
  put_leb128(out, static_cast<std::uint64_t>(h.depth));
  put_leb128(out, static_cast<std::uint64_t>(h.l0));
  put_leb128(out, static_cast<std::uint64_t>(h.order));
  put_f64(out, h.delta);
  put_leb128(out, static_cast<std::uint64_t>(h.predictor.kind));
  if (is_llwa(h.predictor.kind)) {
    for (const double w : h.predictor.llwa.w) put_f64(out, w);
  } else if (h.predictor.kind == PredictorKind::kPbf) {
    put_f64(out, h.predictor.pbf.sigma_x);
    put_f64(out, h.predictor.pbf.sigma_y);
    put_leb128(out, static_cast<std::uint64_t>(h.predictor.pbf.stages()));
    for (const double r : h.predictor.pbf.r) put_f64(out, r);
  }
  put_leb128(out, static_cast<std::uint64_t>(h.poly_degree));
  put_leb128(out, static_cast<std::uint64_t>(h.preconditioning));
  for (const auto& level : chunks) {
    for (const auto& c : level) put_leb128(out, c.size());
  }
  for (const auto& level : chunks) {
    for (const auto& c : level) out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

ParsedBitstream parse_bitstream(std::span<const std::byte> bytes) {
  if (bytes.size() < kMagic.size() + 1) throw FormatError("bitstream too short");
  for (std::size_t i = 0; i < kMagic.size(); ++i) {
    if (std::to_integer<char>(bytes[i]) != kMagic[i]) throw FormatError("bad magic");
  }
  const auto version = std::to_integer<std::uint8_t>(bytes[4]);
  if (version != kFormatVersion) throw FormatError("unsupported version " + std::to_string(version));
  std::size_t pos = 5;
  ParsedBitstream out;
  BitstreamHeader& h = out.header;
  h.depth = get_small(bytes, pos, kMortonBits, "L");
  h.l0 = get_small(bytes, pos, kMortonBits, "l0");
  h.order = get_small(bytes, pos, 2, "p");
  if (h.depth < 1 || h.l0 >= h.depth || h.order < 1) throw FormatError("inconsistent level header");
  h.delta = get_f64(bytes, pos);
  if (!(h.delta > 0.0) || !std::isfinite(h.delta)) throw FormatError("invalid step size");
  h.predictor = PredictorParams{};
  h.predictor.kind = static_cast<PredictorKind>(get_small(bytes, pos, 3, "predictor"));
  if (is_llwa(h.predictor.kind)) {
    for (double& w : h.predictor.llwa.w) w = get_f64(bytes, pos);
  } else if (h.predictor.kind == PredictorKind::kPbf) {
    h.predictor.pbf.sigma_x = get_f64(bytes, pos);
    h.predictor.pbf.sigma_y = get_f64(bytes, pos);
    const int k = get_small(bytes, pos, 1u << 16, "K");
    h.predictor.pbf.r.assign(static_cast<std::size_t>(k) + 1, 0.0);
    for (double& r : h.predictor.pbf.r) r = get_f64(bytes, pos);
  }
  h.poly_degree = get_small(bytes, pos, 1u << 16, "P");
  if (h.poly_degree < 1) throw FormatError("polynomial degree must be positive");
  h.preconditioning = static_cast<Preconditioning>(get_small(bytes, pos, 1, "preconditioning"));
  h.chunk_lengths.resize(static_cast<std::size_t>(h.levels()));
  out.chunk_offsets.resize(h.chunk_lengths.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < h.chunk_lengths.size(); ++l) {
    for (std::size_t c = 0; c < kChannels; ++c) {
      const std::uint64_t n = get_leb128(bytes, pos);
      if (n > (std::uint64_t{1} << 48)) throw FormatError("chunk length out of range");
      h.chunk_lengths[l][c] = n;
      out.chunk_offsets[l][c] = offset;
      offset += static_cast<std::size_t>(n);
    }
  }
  out.header_bytes = pos;
  out.declared_payload_bytes = offset;
  out.payload = bytes.subspan(pos);
  if (out.payload.size() > offset) throw FormatError("chunk length mismatch: trailing bytes after last chunk");
  return out;
}

std::span<const std::byte> ParsedBitstream::chunk(int level, std::size_t channel) const {
  if (level < header.l0 || level > header.depth || channel >= kChannels) {
    throw std::out_of_range("chunk: no such level/channel");
  }
  const auto l = static_cast<std::size_t>(level - header.l0);
  const std::size_t begin = chunk_offsets[l][channel];
  const auto len = static_cast<std::size_t>(header.chunk_lengths[l][channel]);
  if (begin + len > payload.size()) {
    throw FormatError("chunk length mismatch: level " + std::to_string(level) + " chunk truncated");
  }
  return payload.subspan(begin, len);
}

int ParsedBitstream::available_depth() const {
  int best = header.l0 - 1;
  for (int level = header.l0; level <= header.depth; ++level) {
    const auto l = static_cast<std::size_t>(level - header.l0);
    const std::size_t end = chunk_offsets[l][kChannels - 1] + header.chunk_lengths[l][kChannels - 1];
    if (end > payload.size()) break;
    best = level;
  }
  return best;
}

}  // namespace vspc
