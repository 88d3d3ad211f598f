#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vspc/point_cloud.hpp"

namespace vspc {

/// Parses an ASCII or binary_little_endian PLY with vertex properties
/// x, y, z (any scalar type) and red, green, blue (uchar). Other
/// properties and elements are skipped. Throws PlyError with the byte
/// offset of the failure.
RawPointCloud parse_ply(std::span<const std::byte> bytes);
RawPointCloud parse_ply(const std::string& text);

enum class PlyEncoding { kAscii, kBinaryLittleEndian };

/// Writes x, y, z as double and red, green, blue as uchar.
std::string write_ply(const RawPointCloud& cloud, PlyEncoding encoding = PlyEncoding::kAscii);

RawPointCloud read_ply_file(const std::filesystem::path& path);
void write_ply_file(const std::filesystem::path& path, const RawPointCloud& cloud,
                    PlyEncoding encoding = PlyEncoding::kAscii);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace vspc
