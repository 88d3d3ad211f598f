#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vspc/errors.hpp"

namespace vspc {

/// MSB-first bit writer; the last byte is zero-padded.
class BitWriter {
 public:
  void put_bit(bool bit) {
    acc_ = (acc_ << 1) | (bit ? 1u : 0u);
    if (++fill_ == 8) flush_byte();
  }

  /// Writes the low `n` bits of `value` (n <= 64), most significant first.
  void put_bits(int n, std::uint64_t value) {
    for (int i = n - 1; i >= 0; --i) put_bit(((value >> i) & 1u) != 0);
  }

  void put_ones(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) put_bit(true);
  }

  std::size_t bit_count() const { return bytes_.size() * 8 + static_cast<std::size_t>(fill_); }

  std::vector<std::byte> finish() {
    if (fill_ > 0) {
      acc_ <<= (8 - fill_);
      flush_byte();
    }
    return std::move(bytes_);
  }

 private:
  void flush_byte() {
    bytes_.push_back(static_cast<std::byte>(acc_ & 0xffu));
    acc_ = 0;
    fill_ = 0;
  }

  std::vector<std::byte> bytes_;
  unsigned acc_ = 0;
  int fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  bool get_bit() {
    if (pos_ >= bytes_.size() * 8) throw FormatError("bit stream exhausted");
    const auto byte = std::to_integer<unsigned>(bytes_[pos_ >> 3]);
    const bool bit = ((byte >> (7 - (pos_ & 7))) & 1u) != 0;
    ++pos_;
    return bit;
  }

  std::uint64_t get_bits(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | (get_bit() ? 1u : 0u);
    return v;
  }

  std::size_t bit_position() const { return pos_; }
  std::size_t bytes_consumed() const { return (pos_ + 7) / 8; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace vspc
