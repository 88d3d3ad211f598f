#include "vspc/ply.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string_view>

#include "vspc/errors.hpp"

namespace vspc {

namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY reader assumes a little-endian host");

enum class ScalarType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

std::optional<ScalarType> scalar_type_from_name(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::kInt8;
  if (name == "uchar" || name == "uint8") return ScalarType::kUint8;
  if (name == "short" || name == "int16") return ScalarType::kInt16;
  if (name == "ushort" || name == "uint16") return ScalarType::kUint16;
  if (name == "int" || name == "int32") return ScalarType::kInt32;
  if (name == "uint" || name == "uint32") return ScalarType::kUint32;
  if (name == "float" || name == "float32") return ScalarType::kFloat32;
  if (name == "double" || name == "float64") return ScalarType::kFloat64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::kInt8:
    case ScalarType::kUint8:
      return 1;
    case ScalarType::kInt16:
    case ScalarType::kUint16:
      return 2;
    case ScalarType::kInt32:
    case ScalarType::kUint32:
    case ScalarType::kFloat32:
      return 4;
    case ScalarType::kFloat64:
      return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kUint8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

enum class Format { kAscii, kBinaryLittleEndian };

struct Header {
  Format format = Format::kAscii;
  std::vector<Element> elements;
  std::size_t payload_offset = 0;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  // Returns the next line without its terminator, or nullopt at end of input.
  std::optional<std::string_view> next_line() {
    if (at_end()) return std::nullopt;
    const auto* base = reinterpret_cast<const char*>(bytes_.data());
    std::size_t end = pos_;
    while (end < bytes_.size() && base[end] != '\n') ++end;
    std::string_view line(base + pos_, end - pos_);
    pos_ = end < bytes_.size() ? end + 1 : end;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  const std::byte* take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw PlyError(std::string("truncated binary payload while reading ") + what, pos_);
    }
    const std::byte* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

std::size_t parse_count(std::string_view token, std::size_t offset) {
  std::size_t value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    throw PlyError("malformed header: bad element count '" + std::string(token) + "'", offset);
  }
  return value;
}

Header parse_header(Cursor& cur) {
  Header header;
  std::size_t line_offset = cur.offset();
  auto magic = cur.next_line();
  if (!magic || split_ws(*magic) != std::vector<std::string_view>{"ply"}) {
    throw PlyError("malformed header: missing 'ply' magic", line_offset);
  }
  bool have_format = false;
  while (true) {
    line_offset = cur.offset();
    auto line = cur.next_line();
    if (!line) throw PlyError("malformed header: missing end_header", line_offset);
    const auto tok = split_ws(*line);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3) throw PlyError("malformed header: bad format line", line_offset);
      if (tok[1] == "ascii") {
        header.format = Format::kAscii;
      } else if (tok[1] == "binary_little_endian") {
        header.format = Format::kBinaryLittleEndian;
      } else {
        throw PlyError("unsupported PLY format '" + std::string(tok[1]) + "'", line_offset);
      }
      have_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw PlyError("malformed header: bad element line", line_offset);
      header.elements.push_back(Element{std::string(tok[1]), parse_count(tok[2], line_offset), {}});
    } else if (tok[0] == "property") {
      if (header.elements.empty()) {
        throw PlyError("malformed header: property before any element", line_offset);
      }
      Property prop;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = scalar_type_from_name(tok[2]);
        const auto it = scalar_type_from_name(tok[3]);
        if (!ct || !it) throw PlyError("malformed header: unknown list type", line_offset);
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = std::string(tok[4]);
      } else if (tok.size() == 3) {
        const auto t = scalar_type_from_name(tok[1]);
        if (!t) throw PlyError("malformed header: unknown property type '" + std::string(tok[1]) + "'", line_offset);
        prop.type = *t;
        prop.name = std::string(tok[2]);
      } else {
        throw PlyError("malformed header: bad property line", line_offset);
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      throw PlyError("malformed header: unknown keyword '" + std::string(tok[0]) + "'", line_offset);
    }
  }
  if (!have_format) throw PlyError("malformed header: missing format line", line_offset);
  header.payload_offset = cur.offset();
  return header;
}

template <typename T>
double load_as_double(const std::byte* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return static_cast<double>(v);
}

double load_scalar(ScalarType t, const std::byte* p) {
  switch (t) {
    case ScalarType::kInt8: return load_as_double<std::int8_t>(p);
    case ScalarType::kUint8: return load_as_double<std::uint8_t>(p);
    case ScalarType::kInt16: return load_as_double<std::int16_t>(p);
    case ScalarType::kUint16: return load_as_double<std::uint16_t>(p);
    case ScalarType::kInt32: return load_as_double<std::int32_t>(p);
    case ScalarType::kUint32: return load_as_double<std::uint32_t>(p);
    case ScalarType::kFloat32: return load_as_double<float>(p);
    case ScalarType::kFloat64: return load_as_double<double>(p);
  }
  return 0.0;
}

// Slots of the vertex properties we extract: x, y, z, red, green, blue.
struct VertexLayout {
  std::array<int, 6> slot{-1, -1, -1, -1, -1, -1};
};

VertexLayout vertex_layout(const Element& el, std::size_t offset) {
  static constexpr std::array<std::string_view, 6> kNames{"x", "y", "z", "red", "green", "blue"};
  VertexLayout layout;
  for (std::size_t i = 0; i < el.properties.size(); ++i) {
    for (std::size_t k = 0; k < kNames.size(); ++k) {
      if (el.properties[i].name == kNames[k]) {
        if (el.properties[i].is_list) {
          throw PlyError("unsupported property layout: '" + el.properties[i].name + "' is a list", offset);
        }
        if (k >= 3 && el.properties[i].type != ScalarType::kUint8) {
          throw PlyError("unsupported property layout: '" + el.properties[i].name + "' must be uchar", offset);
        }
        layout.slot[k] = static_cast<int>(i);
      }
    }
  }
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    if (layout.slot[k] < 0) {
      throw PlyError("unsupported property layout: vertex element lacks '" + std::string(kNames[k]) + "'", offset);
    }
  }
  return layout;
}

RawPoint make_point(const std::vector<double>& values, const VertexLayout& layout, std::size_t offset) {
  RawPoint p;
  for (int a = 0; a < 3; ++a) {
    p.position[a] = values[static_cast<std::size_t>(layout.slot[a])];
    if (!std::isfinite(p.position[a])) throw PlyError("non-finite vertex position", offset);
  }
  for (int c = 0; c < 3; ++c) {
    const double v = values[static_cast<std::size_t>(layout.slot[3 + c])];
    if (v < 0 || v > 255 || v != std::floor(v)) throw PlyError("color value outside uchar range", offset);
    p.color[c] = static_cast<std::uint8_t>(v);
  }
  return p;
}

void read_ascii(Cursor& cur, const Header& header, RawPointCloud& out) {
  for (const auto& el : header.elements) {
    const bool is_vertex = el.name == "vertex";
    const VertexLayout layout = is_vertex ? vertex_layout(el, header.payload_offset) : VertexLayout{};
    std::vector<double> values(el.properties.size());
    std::size_t row = 0;
    while (row < el.count) {
      const std::size_t line_offset = cur.offset();
      auto line = cur.next_line();
      if (!line) {
        throw PlyError("truncated payload: element '" + el.name + "' declares " + std::to_string(el.count) +
                           " rows, found " + std::to_string(row),
                       line_offset);
      }
      const auto tok = split_ws(*line);
      if (tok.empty()) continue;
      std::size_t t = 0;
      auto next_number = [&](const char* what) {
        if (t >= tok.size()) throw PlyError(std::string("truncated row: missing ") + what, line_offset);
        double v = 0.0;
        const auto s = tok[t++];
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
          throw PlyError("malformed number '" + std::string(s) + "'", line_offset);
        }
        return v;
      };
      for (std::size_t i = 0; i < el.properties.size(); ++i) {
        const auto& prop = el.properties[i];
        if (prop.is_list) {
          const double n = next_number("list count");
          if (n < 0 || n != std::floor(n)) throw PlyError("malformed list count", line_offset);
          for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) next_number("list item");
        } else {
          values[i] = next_number(prop.name.c_str());
        }
      }
      if (is_vertex) out.push_back(make_point(values, layout, line_offset));
      ++row;
    }
    if (is_vertex) return;
  }
}

void read_binary(Cursor& cur, const Header& header, RawPointCloud& out) {
  for (const auto& el : header.elements) {
    const bool is_vertex = el.name == "vertex";
    const VertexLayout layout = is_vertex ? vertex_layout(el, header.payload_offset) : VertexLayout{};
    std::vector<double> values(el.properties.size());
    for (std::size_t row = 0; row < el.count; ++row) {
      const std::size_t row_offset = cur.offset();
      for (std::size_t i = 0; i < el.properties.size(); ++i) {
        const auto& prop = el.properties[i];
        if (prop.is_list) {
          const double n = load_scalar(prop.count_type, cur.take(scalar_size(prop.count_type), "list count"));
          if (n < 0) throw PlyError("negative list count", row_offset);
          cur.take(static_cast<std::size_t>(n) * scalar_size(prop.type), "list items");
        } else {
          values[i] = load_scalar(prop.type, cur.take(scalar_size(prop.type), prop.name.c_str()));
        }
      }
      if (is_vertex) out.push_back(make_point(values, layout, row_offset));
    }
    if (is_vertex) return;
  }
}

}  // namespace

RawPointCloud parse_ply(std::span<const std::byte> bytes) {
  Cursor cur(bytes);
  const Header header = parse_header(cur);
  bool has_vertex = false;
  for (const auto& el : header.elements) has_vertex |= el.name == "vertex";
  if (!has_vertex) throw PlyError("unsupported property layout: no vertex element", header.payload_offset);

  RawPointCloud out;
  if (header.format == Format::kAscii) {
    read_ascii(cur, header, out);
  } else {
    read_binary(cur, header, out);
  }
  return out;
}

RawPointCloud parse_ply(const std::string& text) {
  return parse_ply(std::as_bytes(std::span<const char>(text.data(), text.size())));
}

std::string write_ply(const RawPointCloud& cloud, PlyEncoding encoding) {
  std::string out;
  out += "ply\n";
  out += encoding == PlyEncoding::kAscii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "end_header\n";
  if (encoding == PlyEncoding::kAscii) {
    char buf[128];
    for (const auto& p : cloud) {
      const int n = std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %u %u %u\n", p.position[0], p.position[1],
                                  p.position[2], unsigned{p.color[0]}, unsigned{p.color[1]}, unsigned{p.color[2]});
      out.append(buf, static_cast<std::size_t>(n));
    }
  } else {
    for (const auto& p : cloud) {
      char buf[3 * sizeof(double) + 3];
      std::memcpy(buf, p.position.data(), 3 * sizeof(double));
      std::memcpy(buf + 3 * sizeof(double), p.color.data(), 3);
      out.append(buf, sizeof(buf));
    }
  }
  return out;
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> out(raw.size());
  std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

RawPointCloud read_ply_file(const std::filesystem::path& path) { return parse_ply(read_file_bytes(path)); }

void write_ply_file(const std::filesystem::path& path, const RawPointCloud& cloud, PlyEncoding encoding) {
  const std::string text = write_ply(cloud, encoding);
  write_file_bytes(path, std::as_bytes(std::span<const char>(text.data(), text.size())));
}

}  // namespace vspc
