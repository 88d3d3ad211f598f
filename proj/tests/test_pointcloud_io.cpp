#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <sstream>
#include <tuple>

#include "vspc/color.hpp"
#include "vspc/errors.hpp"
#include "vspc/morton.hpp"
#include "vspc/ply.hpp"
#include "vspc/point_cloud.hpp"

using namespace vspc;

TEST_CASE("morton interleave") {
  CHECK(morton_encode(1, 1, 1) == 7);
  CHECK(morton_encode(3, 0, 0) == 9);
  CHECK(morton_encode(0, 1, 0) == 2);
  CHECK(morton_encode(0, 0, 1) == 4);
  CHECK_THROWS_AS(morton_encode(-1, 0, 0), std::out_of_range);
  CHECK_THROWS_AS(morton_encode(0, kMortonLimit, 0), std::out_of_range);
  const MortonKey top = morton_encode(kMortonLimit - 1, kMortonLimit - 1, kMortonLimit - 1);
  CHECK(top == (MortonKey{1} << 63) - 1);
}

TEST_CASE("morton decode inverts encode on a 16^3 sweep") {
  for (int z = 0; z < 16; ++z)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const Coord c = morton_decode(morton_encode(x, y, z));
        REQUIRE(c == Coord{x, y, z});
      }
}

TEST_CASE("morton order equals the z-order comparator") {
  // Compare by the highest differing bit across the three axes; ties in bit
  // position are broken z > y > x.
  auto less = [](const Coord& a, const Coord& b) {
    int best_bit = -1, best_axis = -1;
    for (int axis = 0; axis < 3; ++axis) {
      const std::uint32_t diff = static_cast<std::uint32_t>(a[axis] ^ b[axis]);
      if (diff == 0) continue;
      const int bit = 31 - __builtin_clz(diff);
      if (bit > best_bit || (bit == best_bit && axis > best_axis)) {
        best_bit = bit;
        best_axis = axis;
      }
    }
    return best_axis >= 0 && a[best_axis] < b[best_axis];
  };
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> d(0, (1 << 21) - 1);
  std::vector<Coord> pts(10000);
  for (auto& p : pts) p = {d(rng), d(rng), d(rng)};
  auto by_key = pts;
  std::sort(by_key.begin(), by_key.end(), [](const Coord& a, const Coord& b) { return morton_encode(a) < morton_encode(b); });
  auto by_cmp = pts;
  std::sort(by_cmp.begin(), by_cmp.end(), less);
  CHECK(by_key == by_cmp);
}

TEST_CASE("rgb_to_yuv reference values") {
  const Color3 black = rgb_to_yuv(Rgb8{0, 0, 0});
  CHECK(black[0] == doctest::Approx(0.0));
  CHECK(black[1] == doctest::Approx(128.0));
  CHECK(black[2] == doctest::Approx(128.0));
  const Color3 white = rgb_to_yuv(Rgb8{255, 255, 255});
  CHECK(white[0] == doctest::Approx(255.0).epsilon(1e-12));
  CHECK(white[1] == doctest::Approx(128.0).epsilon(1e-12));
  CHECK(white[2] == doctest::Approx(128.0).epsilon(1e-12));
  const Color3 red = rgb_to_yuv(Rgb8{255, 0, 0});
  CHECK(red[0] == doctest::Approx(76.245).epsilon(1e-9));
  CHECK(red[1] == doctest::Approx(84.97232).epsilon(1e-9));
  CHECK(red[2] == doctest::Approx(255.5).epsilon(1e-12));  // stored unclamped
}

TEST_CASE("yuv_to_rgb inverts rgb_to_yuv") {
  const Color3 k = yuv_to_rgb({0.0, 128.0, 128.0});
  for (double v : k) CHECK(std::abs(v) < 1e-9);
  const Color3 w = yuv_to_rgb({255.0, 128.0, 128.0});
  for (double v : w) CHECK(std::abs(v - 255.0) < 1e-9);

  double worst = 0;
  for (int r = 0; r < 256; r += 17)
    for (int g = 0; g < 256; g += 17)
      for (int b = 0; b < 256; b += 17) {
        const Color3 back = yuv_to_rgb(rgb_to_yuv(Rgb8{std::uint8_t(r), std::uint8_t(g), std::uint8_t(b)}));
        worst = std::max({worst, std::abs(back[0] - r), std::abs(back[1] - g), std::abs(back[2] - b)});
      }
  CHECK(worst < 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Color3 rgb{u(rng), u(rng), u(rng)};
    const Color3 back = yuv_to_rgb(rgb_to_yuv(rgb));
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(back[c] - rgb[c]));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("to_rgb8 rounds and clamps") {
  CHECK(to_rgb8({-3.0, 127.5, 300.0}) == Rgb8{0, 128, 255});
  CHECK(to_rgb8({0.49, 254.51, 10.0}) == Rgb8{0, 255, 10});
}

TEST_CASE("parse_ply ascii single vertex") {
  const std::string text =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n"
      "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n0 0 0 255 0 0\n";
  const RawPointCloud c = parse_ply(text);
  REQUIRE(c.size() == 1);
  CHECK(c[0].position == std::array<double, 3>{0, 0, 0});
  CHECK(c[0].color == Rgb8{255, 0, 0});
}

TEST_CASE("parse_ply skips extra properties and elements") {
  const std::string text =
      "ply\nformat ascii 1.0\ncomment made by hand\nelement vertex 2\nproperty float x\nproperty float nx\n"
      "property float y\nproperty float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
      "property uchar alpha\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n"
      "1 9 2 3 10 20 30 255\n4 9 5 6 40 50 60 255\n3 0 1 1\n";
  const RawPointCloud c = parse_ply(text);
  REQUIRE(c.size() == 2);
  CHECK(c[1].position == std::array<double, 3>{4, 5, 6});
  CHECK(c[1].color == Rgb8{40, 50, 60});
}

TEST_CASE("parse_ply truncation and header errors carry offsets") {
  const std::string header =
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\n"
      "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  try {
    (void)parse_ply(header + "0 0 0 1 2 3\n");
    FAIL("expected truncation");
  } catch (const PlyError& e) {
    CHECK(std::string(e.what()).find("truncated") != std::string::npos);
    CHECK(e.offset() >= header.size());
  }
  CHECK_THROWS_AS(parse_ply(std::string("plx\nformat ascii 1.0\nend_header\n")), PlyError);
  CHECK_THROWS_AS(parse_ply(std::string("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n0\n")),
                  PlyError);
  CHECK_THROWS_AS(parse_ply(std::string("ply\nformat binary_big_endian 1.0\nelement vertex 0\nend_header\n")),
                  PlyError);
  try {
    (void)parse_ply(std::string(
        "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n"
        "property float red\nproperty uchar green\nproperty uchar blue\nend_header\n0 0 0 1 2 3\n"));
    FAIL("expected layout error");
  } catch (const PlyError& e) {
    CHECK(std::string(e.what()).find("uchar") != std::string::npos);
  }
}

TEST_CASE("parse_ply binary little endian, hand-decoded reference") {
  // Header, then 3 vertices of float32 x,y,z and uchar r,g,b = 15 bytes each.
  std::string bytes =
      "ply\nformat binary_little_endian 1.0\nelement vertex 3\nproperty float x\nproperty float y\n"
      "property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  const unsigned char payload[] = {
      0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0x40, 0x00, 0x00, 0x40, 0x40, 0x0a, 0x14, 0x1e,  // 1, 2, 3
      0x00, 0x00, 0x00, 0xbf, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x20, 0x41, 0xff, 0x00, 0x80,  // -0.5, 0, 10
      0xcd, 0xcc, 0xcc, 0x3d, 0x00, 0x00, 0xc8, 0x42, 0x00, 0x00, 0x80, 0xbf, 0x01, 0x02, 0x03,  // 0.1f, 100, -1
  };
  bytes.append(reinterpret_cast<const char*>(payload), sizeof payload);
  const RawPointCloud c = parse_ply(bytes);
  REQUIRE(c.size() == 3);
  CHECK(c[0].position == std::array<double, 3>{1, 2, 3});
  CHECK(c[0].color == Rgb8{10, 20, 30});
  CHECK(c[1].position == std::array<double, 3>{-0.5, 0, 10});
  CHECK(c[1].color == Rgb8{255, 0, 128});
  CHECK(c[2].position[0] == static_cast<double>(0.1f));
  CHECK(c[2].position[1] == 100.0);
  CHECK(c[2].position[2] == -1.0);
  CHECK(c[2].color == Rgb8{1, 2, 3});
  CHECK_THROWS_AS(parse_ply(bytes.substr(0, bytes.size() - 1)), PlyError);
}

TEST_CASE("write_ply round trip in both encodings") {
  RawPointCloud c = {{{0.25, -3, 1e6}, {1, 2, 3}}, {{7, 8, 9}, {255, 254, 0}}};
  for (auto enc : {PlyEncoding::kAscii, PlyEncoding::kBinaryLittleEndian}) {
    const RawPointCloud back = parse_ply(write_ply(c, enc));
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back[i].position == c[i].position);
      CHECK(back[i].color == c[i].color);
    }
  }
  CHECK(write_ply(c).find("format ascii") != std::string::npos);
}

TEST_CASE("voxelize averages colors per voxel") {
  // Two points in the same voxel with Y = 10 and 30 (gray colors), plus a
  // far point to fix the bounding box.
  RawPointCloud c = {{{0, 0, 0}, {10, 10, 10}}, {{0.1, 0.1, 0.1}, {30, 30, 30}}, {{7, 7, 7}, {0, 0, 0}}};
  const VoxelCloud v = voxelize(c, 3);
  REQUIRE(v.size() == 2);
  CHECK(v.voxels[0].key == 0);
  CHECK(v.voxels[0].attr[0] == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("voxelize single point and unit cube corners") {
  const VoxelCloud one = voxelize({{{5, -2, 3}, {1, 2, 3}}}, 4);
  REQUIRE(one.size() == 1);
  CHECK(one.voxels[0].key == 0);

  RawPointCloud corners;
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) corners.push_back({{double(x), double(y), double(z)}, {0, 0, 0}});
  const VoxelCloud v = voxelize(corners, 1);
  REQUIRE(v.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(v.voxels[i].key == i);
}

TEST_CASE("voxelize degenerate axes, aspect ratio and errors") {
  // z is constant, x spans twice the y extent.
  RawPointCloud c = {{{0, 0, 5}, {0, 0, 0}}, {{2, 1, 5}, {0, 0, 0}}};
  const VoxelCloud v = voxelize(c, 3);
  REQUIRE(v.size() == 2);
  const Coord hi = morton_decode(v.voxels[1].key);
  CHECK(hi[0] == 7);
  CHECK(hi[1] == 3 + (7 - 3) / 2);
  CHECK(hi[2] == 0);
  CHECK(morton_decode(v.voxels[0].key) == Coord{0, 2, 0});
  CHECK_THROWS_AS(voxelize({}, 3), std::invalid_argument);
  CHECK_THROWS_AS(voxelize(c, 0), std::invalid_argument);
  CHECK_THROWS_AS(voxelize(c, 22), std::invalid_argument);
}

TEST_CASE("voxelize output is sorted, unique and idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 9.0);
  std::uniform_int_distribution<int> col(0, 255);
  RawPointCloud c(3000);
  for (auto& p : c) {
    p.position = {u(rng), u(rng), 0.5 * u(rng)};
    p.color = {std::uint8_t(col(rng)), std::uint8_t(col(rng)), std::uint8_t(col(rng))};
  }
  const VoxelCloud v = voxelize(c, 5);
  for (std::size_t i = 1; i < v.size(); ++i) REQUIRE(v.voxels[i - 1].key < v.voxels[i].key);

  // Integer-coordinate cloud whose colors survive RGB8 export.
  RawPointCloud grid;
  for (int i = 0; i < 200; ++i) {
    grid.push_back({{double(i % 16), double((i / 16) % 16), double((i * 5) % 11)},
                    {std::uint8_t(i), std::uint8_t(255 - i), std::uint8_t(i / 2)}});
  }
  const VoxelCloud a = voxelize(grid, 4);
  const VoxelCloud b = voxelize(to_raw(a), 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.voxels[i].key == b.voxels[i].key);
    for (int ch = 0; ch < 3; ++ch) CHECK(b.voxels[i].attr[ch] == doctest::Approx(a.voxels[i].attr[ch]).epsilon(1e-9));
  }
}

TEST_CASE("voxel CSV dump") {
  VoxelCloud v;
  v.depth = 2;
  v.voxels.push_back({morton_encode(1, 2, 3), {1.5, 2.0, 3.0}});
  std::ostringstream os;
  write_voxel_csv(os, v);
  CHECK(os.str() == "morton,x,y,z,Y,U,V\n" + std::to_string(morton_encode(1, 2, 3)) + ",1,2,3,1.5,2,3\n");
}
