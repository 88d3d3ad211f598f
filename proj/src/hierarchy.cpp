#include "vspc/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "vspc/errors.hpp"

namespace vspc {

namespace instrument {
std::size_t& sparse_applications() {
  thread_local std::size_t count = 0;
  return count;
}
}  // namespace instrument

namespace {

void sort_unique(std::vector<MortonKey>& keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
}

std::int64_t find_index(std::span<const MortonKey> keys, std::int64_t x, std::int64_t y, std::int64_t z) {
  if (x < 0 || y < 0 || z < 0 || x >= kMortonLimit || y >= kMortonLimit || z >= kMortonLimit) return -1;
  const MortonKey key = morton_encode(x, y, z);
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return -1;
  return it - keys.begin();
}

void check_rows(const Signal& v, std::size_t expected, const char* what) {
  if (v.rows() != expected) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (got " + std::to_string(v.rows()) +
                                ", expected " + std::to_string(expected) + ")");
  }
}

}  // namespace

std::optional<std::size_t> LevelGraph::find(MortonKey key) const {
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

bool LevelGraph::gram_is_diagonal() const {
  for (std::size_t i = 0; i < size(); ++i) {
    for (int k = 0; k < kNeighborhood; ++k) {
      if (k != kSelfOffset && gram_at(i, k) != 0.0) return false;
    }
  }
  return true;
}

LevelGraph make_level_graph(int level, std::vector<MortonKey> keys) {
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i - 1] >= keys[i]) throw std::invalid_argument("make_level_graph: keys not strictly increasing");
  }
  LevelGraph g;
  g.level = level;
  g.keys = std::move(keys);
  g.coords.reserve(g.keys.size());
  for (const MortonKey key : g.keys) g.coords.push_back(morton_decode(key));
  g.neighbors.assign(g.keys.size() * kNeighborhood, -1);
  g.gram.assign(g.keys.size() * kNeighborhood, 0.0);
  for (std::size_t i = 0; i < g.keys.size(); ++i) {
    const Coord& c = g.coords[i];
    for (int k = 0; k < kNeighborhood; ++k) {
      const Coord d = offset_from_index(k);
      const std::int64_t j = k == kSelfOffset ? static_cast<std::int64_t>(i)
                                              : find_index(g.keys, std::int64_t{c[0]} + d[0],
                                                           std::int64_t{c[1]} + d[1], std::int64_t{c[2]} + d[2]);
      g.neighbors[i * kNeighborhood + static_cast<std::size_t>(k)] = static_cast<std::int32_t>(j);
    }
  }
  return g;
}

std::vector<std::vector<MortonKey>> build_node_sets(std::span<const MortonKey> voxel_keys, int depth, int order,
                                                    int l0) {
  if (order != 1 && order != 2) throw ConfigError("build_node_sets: order must be 1 or 2");
  if (l0 < 0 || l0 > depth) throw ConfigError("build_node_sets: need 0 <= l0 <= depth");
  std::vector<std::vector<MortonKey>> sets(static_cast<std::size_t>(depth - l0 + 1));

  std::vector<Coord> coords;
  coords.reserve(voxel_keys.size());
  for (const MortonKey key : voxel_keys) coords.push_back(morton_decode(key));

  sets.back().assign(voxel_keys.begin(), voxel_keys.end());
  sort_unique(sets.back());

  for (int l = depth - 1; l >= l0; --l) {
    const int shift = depth - l;
    const std::int64_t mask = (std::int64_t{1} << shift) - 1;
    auto& out = sets[static_cast<std::size_t>(l - l0)];
    out.reserve(coords.size() * (order == 1 ? 1 : 2));
    for (const Coord& c : coords) {
      // Per-axis candidate nodes: floor(t), plus floor(t)+1 when p=2 and t is fractional.
      std::array<std::array<std::int64_t, 2>, 3> cand{};
      std::array<int, 3> count{};
      for (int a = 0; a < 3; ++a) {
        const std::int64_t q = std::int64_t{c[a]} >> shift;
        cand[a][0] = q;
        count[a] = 1;
        if (order == 2 && (std::int64_t{c[a]} & mask) != 0) {
          cand[a][1] = q + 1;
          count[a] = 2;
        }
      }
      for (int ix = 0; ix < count[0]; ++ix)
        for (int iy = 0; iy < count[1]; ++iy)
          for (int iz = 0; iz < count[2]; ++iz) out.push_back(morton_encode(cand[0][ix], cand[1][iy], cand[2][iz]));
    }
    sort_unique(out);
  }
  return sets;
}

TwoScaleLink build_two_scale_link(const BsplineKernel& kernel, int parent_level, std::span<const MortonKey> parents,
                                  std::span<const MortonKey> children) {
  TwoScaleLink link;
  link.parent_level = parent_level;
  link.parent_count = parents.size();
  link.child_count = children.size();
  link.parent_offsets.reserve(parents.size() + 1);
  link.parent_offsets.push_back(0);

  std::vector<std::uint32_t> edge_parent;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const Coord n = morton_decode(parents[i]);
    for (int k = 0; k < kNeighborhood; ++k) {
      const double w = kernel.weights[static_cast<std::size_t>(k)];
      if (w == 0.0) continue;
      const Coord d = offset_from_index(k);
      const std::int64_t j = find_index(children, 2 * std::int64_t{n[0]} + d[0], 2 * std::int64_t{n[1]} + d[1],
                                        2 * std::int64_t{n[2]} + d[2]);
      if (j < 0) continue;
      link.children.push_back(static_cast<std::uint32_t>(j));
      link.child_weights.push_back(w);
      edge_parent.push_back(static_cast<std::uint32_t>(i));
    }
    link.parent_offsets.push_back(static_cast<std::uint32_t>(link.children.size()));
  }

  // Child-major transpose; parents stay in increasing order per child.
  link.child_offsets.assign(children.size() + 1, 0);
  for (const auto j : link.children) ++link.child_offsets[j + 1];
  for (std::size_t j = 0; j < children.size(); ++j) link.child_offsets[j + 1] += link.child_offsets[j];
  link.parents.resize(link.children.size());
  link.parent_weights.resize(link.children.size());
  std::vector<std::uint32_t> fill(link.child_offsets.begin(), link.child_offsets.end() - 1);
  for (std::size_t e = 0; e < link.children.size(); ++e) {
    const auto slot = fill[link.children[e]]++;
    link.parents[slot] = edge_parent[e];
    link.parent_weights[slot] = link.child_weights[e];
  }
  return link;
}

Signal apply_A(const TwoScaleLink& link, const Signal& v) {
  check_rows(v, link.child_count, "apply_A");
  const std::size_t nc = v.channels();
  Signal out(link.parent_count, nc);
  for (std::size_t i = 0; i < link.parent_count; ++i) {
    auto dst = out.row(i);
    for (auto e = link.parent_offsets[i]; e < link.parent_offsets[i + 1]; ++e) {
      const double w = link.child_weights[e];
      const auto src = v.row(link.children[e]);
      for (std::size_t c = 0; c < nc; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

Signal apply_At(const TwoScaleLink& link, const Signal& v) {
  check_rows(v, link.parent_count, "apply_At");
  const std::size_t nc = v.channels();
  Signal out(link.child_count, nc);
  for (std::size_t j = 0; j < link.child_count; ++j) {
    auto dst = out.row(j);
    for (auto e = link.child_offsets[j]; e < link.child_offsets[j + 1]; ++e) {
      const double w = link.parent_weights[e];
      const auto src = v.row(link.parents[e]);
      for (std::size_t c = 0; c < nc; ++c) dst[c] += w * src[c];
    }
  }
  return out;
}

LevelGraph init_gram_finest(int depth, std::vector<MortonKey> keys) {
  LevelGraph g = make_level_graph(depth, std::move(keys));
  for (std::size_t i = 0; i < g.size(); ++i) g.gram[i * kNeighborhood + kSelfOffset] = 1.0;
  return g;
}

std::vector<double> propagate_gram(const TwoScaleLink& link, const LevelGraph& child, const LevelGraph& parent) {
  if (link.child_count != child.size() || link.parent_count != parent.size()) {
    throw std::invalid_argument("propagate_gram: link does not match level sizes");
  }
  std::vector<double> gram(parent.size() * kNeighborhood, 0.0);
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const Coord& ni = parent.coords[i];
    double* row = gram.data() + i * kNeighborhood;
    for (auto e = link.parent_offsets[i]; e < link.parent_offsets[i + 1]; ++e) {
      const std::size_t u = link.children[e];
      const double a_iu = link.child_weights[e];
      for (int k = 0; k < kNeighborhood; ++k) {
        const double g = child.gram_at(u, k);
        if (g == 0.0) continue;
        const std::size_t v = static_cast<std::size_t>(child.neighbor(u, k));
        for (auto f = link.child_offsets[v]; f < link.child_offsets[v + 1]; ++f) {
          const std::size_t j = link.parents[f];
          const Coord& nj = parent.coords[j];
          const int dx = nj[0] - ni[0], dy = nj[1] - ni[1], dz = nj[2] - ni[2];
          if (dx < -1 || dx > 1 || dy < -1 || dy > 1 || dz < -1 || dz > 1) {
            throw std::logic_error("propagate_gram: Gram support leaves the 27-neighborhood");
          }
          row[offset_index(dx, dy, dz)] += a_iu * g * link.parent_weights[f];
        }
      }
    }
  }
  return gram;
}

Signal apply_gram(const LevelGraph& graph, const Signal& v) {
  check_rows(v, graph.size(), "apply_gram");
  ++instrument::sparse_applications();
  const std::size_t nc = v.channels();
  Signal out(graph.size(), nc);
  const double* src = v.data().data();
  double* dst_all = out.data().data();
  for (std::size_t i = 0; i < graph.size(); ++i) {
    double* dst = dst_all + i * nc;
    const std::int32_t* nbr = graph.neighbors.data() + i * kNeighborhood;
    const double* g = graph.gram.data() + i * kNeighborhood;
    for (int k = 0; k < kNeighborhood; ++k) {
      if (nbr[k] < 0 || g[k] == 0.0) continue;
      const double* s = src + static_cast<std::size_t>(nbr[k]) * nc;
      for (std::size_t c = 0; c < nc; ++c) dst[c] += g[k] * s[c];
    }
  }
  return out;
}

const LevelGraph& Hierarchy::graph(int level) const {
  if (level < l0 || level > depth) throw std::out_of_range("Hierarchy::graph: level " + std::to_string(level));
  return graphs[static_cast<std::size_t>(level - l0)];
}

const TwoScaleLink& Hierarchy::link(int parent_level) const {
  if (parent_level < l0 || parent_level >= depth) {
    throw std::out_of_range("Hierarchy::link: level " + std::to_string(parent_level));
  }
  return links[static_cast<std::size_t>(parent_level - l0)];
}

Hierarchy build_hierarchy(std::span<const MortonKey> voxel_keys, int depth, int order, int l0) {
  if (voxel_keys.empty()) throw ConfigError("build_hierarchy: empty geometry");
  if (depth < 1 || depth > kMortonBits) throw ConfigError("build_hierarchy: depth must be in [1, 21]");
  if (l0 < 0 || l0 > depth) throw ConfigError("build_hierarchy: need 0 <= l0 <= depth");
  if (order != 1 && order != 2) throw ConfigError("build_hierarchy: order must be 1 or 2");
  Hierarchy h;
  h.order = order;
  h.l0 = l0;
  h.depth = depth;
  h.kernel = build_kernel(order);

  auto sets = build_node_sets(voxel_keys, depth, order, l0);
  const std::size_t levels = sets.size();
  h.graphs.resize(levels);
  h.graphs.back() = init_gram_finest(depth, std::move(sets.back()));
  for (int l = depth - 1; l >= l0; --l) {
    const auto idx = static_cast<std::size_t>(l - l0);
    h.graphs[idx] = make_level_graph(l, std::move(sets[idx]));
  }
  h.links.resize(levels - 1);
  for (int l = depth - 1; l >= l0; --l) {
    const auto idx = static_cast<std::size_t>(l - l0);
    h.links[idx] = build_two_scale_link(h.kernel, l, h.graphs[idx].keys, h.graphs[idx + 1].keys);
    h.graphs[idx].gram = propagate_gram(h.links[idx], h.graphs[idx + 1], h.graphs[idx]);
  }
  return h;
}

void write_gram_csv(std::ostream& os, const LevelGraph& graph) {
  os << "level,node,morton,dx,dy,dz,neighbor,value\n";
  char buf[192];
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (int k = 0; k < kNeighborhood; ++k) {
      if (graph.neighbor(i, k) < 0) continue;
      const Coord d = offset_from_index(k);
      std::snprintf(buf, sizeof(buf), "%d,%zu,%llu,%d,%d,%d,%d,%.17g\n", graph.level, i,
                    static_cast<unsigned long long>(graph.keys[i]), d[0], d[1], d[2], graph.neighbor(i, k),
                    graph.gram_at(i, k));
      os << buf;
    }
  }
}

void write_link_csv(std::ostream& os, const TwoScaleLink& link) {
  os << "parent_level,parent,child,weight\n";
  char buf[128];
  for (std::size_t i = 0; i < link.parent_count; ++i) {
    for (auto e = link.parent_offsets[i]; e < link.parent_offsets[i + 1]; ++e) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%u,%.17g\n", link.parent_level, i, link.children[e],
                    link.child_weights[e]);
      os << buf;
    }
  }
}

}  // namespace vspc
