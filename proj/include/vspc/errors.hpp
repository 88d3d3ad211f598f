#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vspc {

/// Malformed or unsupported input data (PLY files, bitstreams).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// PLY parse failure at a given byte offset of the input.
class PlyError : public FormatError {
 public:
  PlyError(const std::string& what, std::size_t offset)
      : FormatError(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid codec configuration or a configuration that does not match the
/// geometry it is applied to.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vspc
