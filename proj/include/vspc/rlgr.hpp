#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vspc {

constexpr std::uint64_t zigzag(std::int64_t x) {
  return x >= 0 ? static_cast<std::uint64_t>(x) << 1 : (static_cast<std::uint64_t>(-(x + 1)) << 1) | 1u;
}

constexpr std::int64_t unzigzag(std::uint64_t u) {
  return (u & 1u) ? -static_cast<std::int64_t>(u >> 1) - 1 : static_cast<std::int64_t>(u >> 1);
}

/// Adaptation constants of the run-length / Golomb-Rice coder. Parameters
/// are kept in fixed point with 4 fractional bits.
struct RlgrConstants {
  static constexpr int kFractionBits = 4;
  // No-run mode, applied to the run parameter after each symbol.
  static constexpr std::uint32_t kNoRunUp = 3;    // symbol == 0
  static constexpr std::uint32_t kNoRunDown = 3;  // symbol != 0
  // Run mode.
  static constexpr std::uint32_t kRunUp = 4;    // complete run of 2^k zeros
  static constexpr std::uint32_t kRunDown = 6;  // partial run ended by a nonzero
  // Golomb-Rice parameter: down when the quotient is 0, up by the quotient when > 1.
  static constexpr std::uint32_t kRiceDown = 2;
  static constexpr std::uint32_t kMaxRun = (20u << kFractionBits) + 15u;
  static constexpr std::uint32_t kMaxRice = (58u << kFractionBits) + 15u;
  // Quotients >= kEscapeQuotient are sent as kEscapeQuotient ones and a
  // raw 64-bit value.
  static constexpr std::uint64_t kEscapeQuotient = 32;
};

/// Fixed-point adaptive state shared by encoder and decoder.
struct RlgrState {
  std::uint32_t run_param = 0;   // k_RUN << 4
  std::uint32_t rice_param = 0;  // k_R << 4

  int run_k() const { return static_cast<int>(run_param >> RlgrConstants::kFractionBits); }
  int rice_k() const { return static_cast<int>(rice_param >> RlgrConstants::kFractionBits); }
  bool run_mode() const { return run_k() > 0; }

  void adapt_rice(std::uint64_t u);
  void adapt_no_run(bool zero);
  void complete_run();
  void partial_run();
};

class BitWriter;
class BitReader;

/// Golomb-Rice codeword: unary quotient u >> k terminated by 0, then k
/// remainder bits. Quotients >= kEscapeQuotient take the raw escape.
void golomb_rice_encode(BitWriter& out, std::uint64_t u, int k);
std::uint64_t golomb_rice_decode(BitReader& in, int k);

/// Encodes signed integers (zigzag mapped). Output is zero-padded to bytes.
std::vector<std::byte> rlgr_encode(std::span<const std::int64_t> values);

/// Decodes exactly `count` integers; throws FormatError when the stream is
/// exhausted first or is inconsistent with `count`. `bytes_consumed`, when
/// given, receives the number of bytes used.
std::vector<std::int64_t> rlgr_decode(std::span<const std::byte> bytes, std::size_t count,
                                      std::size_t* bytes_consumed = nullptr);

}  // namespace vspc
