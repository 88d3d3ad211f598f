#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace vspc {

/// Multi-channel per-node signal, stored node-major (all channels of node 0,
/// then node 1, ...).
class Signal {
 public:
  Signal() = default;
  Signal(std::size_t rows, std::size_t channels, double fill = 0.0)
      : rows_(rows), channels_(channels), data_(rows * channels, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < channels_);
    return data_[r * channels_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < channels_);
    return data_[r * channels_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * channels_, channels_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * channels_, channels_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }
  void set_column(std::size_t c, std::span<const double> values) {
    assert(values.size() == rows_);
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
  }

  bool operator==(const Signal&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

}  // namespace vspc
