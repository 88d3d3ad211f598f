#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vspc/polyop.hpp"
#include "vspc/predictors.hpp"

namespace vspc {

inline constexpr std::array<char, 4> kMagic{'V', 'S', 'P', 'C'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kChannels = 3;

void put_leb128(std::vector<std::byte>& out, std::uint64_t v);
/// Advances `pos`; throws FormatError on truncation or overlong input.
std::uint64_t get_leb128(std::span<const std::byte> in, std::size_t& pos);
void put_f64(std::vector<std::byte>& out, double v);
double get_f64(std::span<const std::byte> in, std::size_t& pos);

struct BitstreamHeader {
  int depth = 0;        // L
  int l0 = 0;
  int order = 2;        // p
  double delta = 1.0;
  PredictorParams predictor;
  int poly_degree = 100;
  Preconditioning preconditioning = Preconditioning::kJacobi;
  /// Byte length of each chunk, [level - l0][channel].
  std::vector<std::array<std::uint64_t, kChannels>> chunk_lengths;

  int levels() const { return depth - l0 + 1; }
};

/// Header followed by the chunks, level-major then Y, U, V.
std::vector<std::byte> write_bitstream(const BitstreamHeader& header,
                                       const std::vector<std::array<std::vector<std::byte>, kChannels>>& chunks);

struct ParsedBitstream {
  BitstreamHeader header;
  std::size_t header_bytes = 0;
  std::span<const std::byte> payload;  // may be shorter than declared
  /// Offsets into payload, [level - l0][channel].
  std::vector<std::array<std::size_t, kChannels>> chunk_offsets;
  std::size_t declared_payload_bytes = 0;

  /// Throws FormatError when the chunk lies beyond the available bytes.
  std::span<const std::byte> chunk(int level, std::size_t channel) const;
  /// Finest level whose chunks are all present.
  int available_depth() const;
};

/// Parses and validates the header. A payload shorter than declared is
/// accepted (progressive decoding); a longer one is a chunk length mismatch.
ParsedBitstream parse_bitstream(std::span<const std::byte> bytes);

}  // namespace vspc
