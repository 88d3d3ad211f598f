#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "vspc/codec.hpp"
#include "vspc/signal.hpp"

namespace vspc {

inline constexpr double kPsnrCap = 999.0;

/// 10 log10(peak^2 / MSE), kPsnrCap when MSE = 0. Throws
/// std::invalid_argument on length mismatch or empty input.
double psnr(std::span<const double> orig, std::span<const double> recon, double peak = 255.0);

struct PsnrYuv {
  double y = 0, u = 0, v = 0;
  /// (6 Y + U + V) / 8
  double yuv() const { return (6.0 * y + u + v) / 8.0; }
};

PsnrYuv psnr_yuv(const Signal& orig, const Signal& recon, double peak = 255.0);

/// Attributes as they survive PLY export: YUV -> RGB8 (rounded, clamped) -> YUV.
Signal export_roundtrip(const Signal& yuv);

struct RdPoint {
  double delta = 0;
  std::size_t bits_total = 0;
  double bpp = 0;
  double psnr_y = 0, psnr_u = 0, psnr_v = 0, psnr_yuv = 0;
  double runtime_ms = 0;
};

RdPoint rd_point(std::size_t bits_total, const Signal& orig, const Signal& recon, double delta, double runtime_ms);

/// One encode per delta, run concurrently; rows in input order. Throws ConfigError on an empty list.
/// With `exported`, PSNR is measured after export_roundtrip of the
/// reconstruction (what a decoded PLY holds).
std::vector<RdPoint> sweep(const CodecContext& context, const Signal& attrs, const CodecConfig& config,
                           std::span<const double> deltas, bool exported = false);
std::vector<RdPoint> sweep(const VoxelCloud& cloud, const CodecConfig& config, std::span<const double> deltas,
                           bool exported = false);

/// Columns delta,bits_total,bpp,psnr_y,psnr_u,psnr_v,psnr_yuv[,runtime_ms].
void write_rd_csv(std::ostream& os, std::span<const RdPoint> rows, bool with_runtime = true);

}  // namespace vspc
