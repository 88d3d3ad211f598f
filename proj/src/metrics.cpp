#include "vspc/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "vspc/color.hpp"
#include "vspc/errors.hpp"

namespace vspc {

double psnr(std::span<const double> orig, std::span<const double> recon, double peak) {
  if (orig.size() != recon.size()) throw std::invalid_argument("psnr: length mismatch");
  if (orig.empty()) throw std::invalid_argument("psnr: empty input");
  double sse = 0.0;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    const double d = orig[i] - recon[i];
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrCap;
  const double mse = sse / static_cast<double>(orig.size());
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

PsnrYuv psnr_yuv(const Signal& orig, const Signal& recon, double peak) {
  if (orig.rows() != recon.rows() || orig.channels() != 3 || recon.channels() != 3) {
    throw std::invalid_argument("psnr_yuv: shape mismatch");
  }
  PsnrYuv out;
  out.y = psnr(orig.column(0), recon.column(0), peak);
  out.u = psnr(orig.column(1), recon.column(1), peak);
  out.v = psnr(orig.column(2), recon.column(2), peak);
  return out;
}

Signal export_roundtrip(const Signal& yuv) {
  Signal out(yuv.rows(), 3);
  for (std::size_t i = 0; i < yuv.rows(); ++i) {
    const Color3 back = rgb_to_yuv(to_rgb8(yuv_to_rgb({yuv(i, 0), yuv(i, 1), yuv(i, 2)})));
    for (std::size_t c = 0; c < 3; ++c) out(i, c) = back[c];
  }
  return out;
}

RdPoint rd_point(std::size_t bits_total, const Signal& orig, const Signal& recon, double delta, double runtime_ms) {
  RdPoint p;
  p.delta = delta;
  p.bits_total = bits_total;
  p.bpp = static_cast<double>(p.bits_total) / static_cast<double>(orig.rows());
  const PsnrYuv q = psnr_yuv(orig, recon);
  p.psnr_y = q.y;
  p.psnr_u = q.u;
  p.psnr_v = q.v;
  p.psnr_yuv = q.yuv();
  p.runtime_ms = runtime_ms;
  return p;
}

std::vector<RdPoint> sweep(const CodecContext& context, const Signal& attrs, const CodecConfig& config,
                           std::span<const double> deltas, bool exported) {
  if (deltas.empty()) throw ConfigError("sweep: empty delta list");
  // One task per delta; rows keep the input order.
  auto run = [&](double d) {
    CodecConfig c = config;
    c.delta = d;
    const auto t0 = std::chrono::steady_clock::now();
    const EncodeResult r = encode(context, attrs, c);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const Signal recon = exported ? export_roundtrip(r.reconstruction()) : r.reconstruction();
    return rd_point(r.total_bits(), attrs, recon, d, ms);
  };
  std::vector<std::future<RdPoint>> tasks;
  tasks.reserve(deltas.size());
  for (const double d : deltas) tasks.push_back(std::async(std::launch::async, run, d));
  std::vector<RdPoint> rows;
  rows.reserve(deltas.size());
  for (auto& t : tasks) rows.push_back(t.get());
  return rows;
}

std::vector<RdPoint> sweep(const VoxelCloud& cloud, const CodecConfig& config, std::span<const double> deltas,
                           bool exported) {
  const CodecContext ctx = make_context(cloud, config);
  return sweep(ctx, attributes(cloud), config, deltas, exported);
}

void write_rd_csv(std::ostream& os, std::span<const RdPoint> rows, bool with_runtime) {
  os << "delta,bits_total,bpp,psnr_y,psnr_u,psnr_v,psnr_yuv" << (with_runtime ? ",runtime_ms" : "") << '\n';
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.delta << ',' << r.bits_total << ',' << r.bpp << ',' << r.psnr_y << ',' << r.psnr_u << ',' << r.psnr_v
       << ',' << r.psnr_yuv;
    if (with_runtime) os << ',' << std::fixed << std::setprecision(3) << r.runtime_ms << std::defaultfloat
                         << std::setprecision(10);
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace vspc
