// vspc: encode/decode/eval/sweep/synth front end.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "vspc/codec.hpp"
#include "vspc/errors.hpp"
#include "vspc/metrics.hpp"
#include "vspc/ply.hpp"
#include "vspc/synth.hpp"

namespace {

using namespace vspc;

constexpr int kExitFormat = 2;
constexpr int kExitConfig = 3;

struct CodecOptions {
  int p = 2;
  int l0 = 4;
  double delta = 8.0;
  std::string predictor = "pbf";
  int poly_degree = 100;
  int pbf_stages = 20;
  int depth = 10;
  std::string precondition = "jacobi";
  bool open_loop = false;
};

void add_codec_options(CLI::App* app, CodecOptions& o, bool with_delta) {
  app->add_option("--p", o.p, "B-spline order (1 or 2)")->capture_default_str();
  app->add_option("--l0", o.l0, "coarsest coded level")->capture_default_str();
  if (with_delta) app->add_option("--delta", o.delta, "quantization step")->capture_default_str();
  app->add_option("--predictor", o.predictor, "none, baseline_llwa, llwa_full or pbf")->capture_default_str();
  app->add_option("--poly-degree", o.poly_degree, "degree P of the Gram polynomials")->capture_default_str();
  app->add_option("--pbf-stages", o.pbf_stages, "PBF stages K")->capture_default_str();
  app->add_option("--depth", o.depth, "voxelization depth L")->capture_default_str();
  app->add_option("--precondition", o.precondition, "jacobi or none")->capture_default_str();
  app->add_flag("--open-loop", o.open_loop, "predict from unquantized coefficients (drifts)");
}

CodecConfig make_config(const CodecOptions& o) {
  CodecConfig c;
  c.order = o.p;
  c.l0 = o.l0;
  c.delta = o.delta;
  c.predictor.kind = parse_predictor(o.predictor);
  if (o.pbf_stages < 0) throw ConfigError("--pbf-stages must be >= 0");
  c.predictor.pbf = default_pbf_params(o.pbf_stages);
  c.poly_degree = o.poly_degree;
  if (o.precondition == "jacobi") {
    c.preconditioning = Preconditioning::kJacobi;
  } else if (o.precondition == "none") {
    c.preconditioning = Preconditioning::kNone;
  } else {
    throw ConfigError("--precondition must be jacobi or none");
  }
  c.open_loop = o.open_loop;
  return c;
}

VoxelCloud load_voxels(const std::string& path, int depth) {
  if (depth < 1 || depth > kMortonBits) throw ConfigError("--depth must be in [1, 21]");
  return voxelize(read_ply_file(path), depth);
}

std::vector<double> parse_deltas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double d = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(d);
    } catch (const std::exception&) {
      throw ConfigError("--deltas: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--deltas: empty list");
  return out;
}

void print_psnr(const char* label, const PsnrYuv& q) {
  std::printf("%s Y=%.6f U=%.6f V=%.6f YUV=%.6f\n", label, q.y, q.u, q.v, q.yuv());
}

int run_encode(const std::string& in, const std::string& out, const CodecOptions& o) {
  const CodecConfig config = make_config(o);
  const VoxelCloud cloud = load_voxels(in, o.depth);
  const EncodeResult r = encode(cloud, config);
  write_file_bytes(out, r.bitstream);
  std::printf("voxels %zu\n", cloud.size());
  std::printf("bytes %zu (header %zu)\n", r.bitstream.size(), r.header_bytes);
  std::printf("bpp %.6f\n", static_cast<double>(r.total_bits()) / static_cast<double>(cloud.size()));
  const Signal orig = attributes(cloud);
  print_psnr("psnr", psnr_yuv(orig, export_roundtrip(r.reconstruction())));
  return 0;
}

int run_decode(const std::string& in, const std::string& geometry, const std::string& out, int max_level,
               bool ascii) {
  const auto bytes = read_file_bytes(in);
  const ParsedBitstream parsed = parse_bitstream(bytes);
  VoxelCloud cloud = voxelize(read_ply_file(geometry), parsed.header.depth);
  const DecodeResult d = decode(bytes, cloud.keys(), max_level);
  set_attributes(cloud, d.attributes);
  write_ply_file(out, to_raw(cloud), ascii ? PlyEncoding::kAscii : PlyEncoding::kBinaryLittleEndian);
  std::printf("voxels %zu level %d\n", cloud.size(), d.decoded_level);
  return 0;
}

int run_eval(const std::string& a, const std::string& b, int depth) {
  const VoxelCloud ca = load_voxels(a, depth);
  const VoxelCloud cb = load_voxels(b, depth);
  if (ca.keys() != cb.keys()) throw FormatError("eval: the two clouds have different voxel geometry");
  print_psnr("psnr", psnr_yuv(attributes(ca), attributes(cb)));
  return 0;
}

int run_sweep(const std::string& in, const std::string& deltas_text, const std::string& out, bool timing,
              const CodecOptions& o) {
  const std::vector<double> deltas = parse_deltas(deltas_text);
  const CodecConfig config = make_config(o);
  const VoxelCloud cloud = load_voxels(in, o.depth);
  const auto rows = sweep(cloud, config, deltas, true);
  if (out.empty()) {
    write_rd_csv(std::cout, rows, timing);
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw FormatError("cannot write " + out);
    write_rd_csv(os, rows, timing);
  }
  return 0;
}

int run_synth(const std::string& kind, int size, const std::string& out, std::uint64_t seed, bool ascii) {
  const VoxelCloud cloud = synth_cloud(parse_synth(kind), size, seed);
  write_ply_file(out, to_raw(cloud), ascii ? PlyEncoding::kAscii : PlyEncoding::kBinaryLittleEndian);
  std::printf("voxels %zu depth %d\n", cloud.size(), cloud.depth);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumetric B-spline point cloud attribute codec"};
  app.require_subcommand(1);

  CodecOptions enc_opts;
  std::string enc_in, enc_out;
  auto* enc = app.add_subcommand("encode", "encode the colors of a PLY cloud");
  enc->add_option("in", enc_in, "input PLY")->required();
  enc->add_option("out", enc_out, "output bitstream")->required();
  add_codec_options(enc, enc_opts, true);

  std::string dec_in, dec_geom, dec_out;
  int max_level = -1;
  bool dec_ascii = false;
  auto* dec = app.add_subcommand("decode", "decode a bitstream onto known geometry");
  dec->add_option("in", dec_in, "input bitstream")->required();
  dec->add_option("geometry", dec_geom, "PLY supplying the voxel geometry")->required();
  dec->add_option("out", dec_out, "output PLY (voxel coordinates)")->required();
  dec->add_option("--max-level", max_level, "decode only up to this level");
  dec->add_flag("--ascii", dec_ascii, "write ASCII PLY");

  std::string eval_a, eval_b;
  int eval_depth = 10;
  auto* ev = app.add_subcommand("eval", "PSNR between two clouds with identical voxel geometry");
  ev->add_option("a", eval_a, "reference PLY")->required();
  ev->add_option("b", eval_b, "test PLY")->required();
  ev->add_option("--depth", eval_depth, "voxelization depth L")->capture_default_str();

  CodecOptions sw_opts;
  std::string sw_in, sw_deltas = "1,2,4,8,16,32,64", sw_out;
  bool sw_timing = false;
  auto* sw = app.add_subcommand("sweep", "rate-distortion table over quantization steps");
  sw->add_option("in", sw_in, "input PLY")->required();
  sw->add_option("--deltas", sw_deltas, "comma-separated steps")->capture_default_str();
  sw->add_option("--out", sw_out, "CSV path (default stdout)");
  sw->add_flag("--timing", sw_timing, "append a runtime_ms column");
  add_codec_options(sw, sw_opts, false);

  std::string syn_kind, syn_out;
  int syn_size = 0;
  std::uint64_t seed = 42;
  bool syn_ascii = false;
  auto* syn = app.add_subcommand("synth", "write a synthetic test cloud");
  syn->add_option("kind", syn_kind, "solid_gradient, checker, plane, noise or shell")->required();
  syn->add_option("size", syn_size, "grid size per axis")->required();
  syn->add_option("out", syn_out, "output PLY")->required();
  syn->add_option("--seed", seed, "noise seed")->capture_default_str();
  syn->add_flag("--ascii", syn_ascii, "write ASCII PLY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*enc) return run_encode(enc_in, enc_out, enc_opts);
    if (*dec) return run_decode(dec_in, dec_geom, dec_out, max_level, dec_ascii);
    if (*ev) return run_eval(eval_a, eval_b, eval_depth);
    if (*sw) return run_sweep(sw_in, sw_deltas, sw_out, sw_timing, sw_opts);
    if (*syn) return run_synth(syn_kind, syn_size, syn_out, seed, syn_ascii);
  } catch (const FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitFormat;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
