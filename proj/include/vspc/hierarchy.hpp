#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vspc/kernel.hpp"
#include "vspc/morton.hpp"
#include "vspc/signal.hpp"

namespace vspc {

/// Nodes of one level, their 27-neighbor adjacency, and the Gram tensor
/// [[Phi_l^T Phi_l]]: gram(i, k) = <phi_{l,n_i}, phi_{l,n_i + d_k}>.
struct LevelGraph {
  int level = 0;
  std::vector<MortonKey> keys;         // strictly increasing
  std::vector<Coord> coords;           // decoded keys
  std::vector<std::int32_t> neighbors;  // size() * 27, -1 when absent
  std::vector<double> gram;            // size() * 27, 0 for absent neighbors

  std::size_t size() const { return keys.size(); }
  std::int32_t neighbor(std::size_t i, int k) const { return neighbors[i * kNeighborhood + static_cast<std::size_t>(k)]; }
  double gram_at(std::size_t i, int k) const { return gram[i * kNeighborhood + static_cast<std::size_t>(k)]; }
  std::optional<std::size_t> find(MortonKey key) const;
  /// True when every off-diagonal Gram entry is zero.
  bool gram_is_diagonal() const;
};

/// Sparse A_l (N_l x N_{l+1}) stored both parent-major and child-major.
struct TwoScaleLink {
  int parent_level = 0;
  std::size_t parent_count = 0;
  std::size_t child_count = 0;

  std::vector<std::uint32_t> parent_offsets;  // parent_count + 1
  std::vector<std::uint32_t> children;
  std::vector<double> child_weights;

  std::vector<std::uint32_t> child_offsets;  // child_count + 1
  std::vector<std::uint32_t> parents;
  std::vector<double> parent_weights;

  std::size_t edge_count() const { return children.size(); }
};

/// Level topology with zero Gram. Keys must be strictly increasing.
LevelGraph make_level_graph(int level, std::vector<MortonKey> keys);

/// Node sets N_l for l = l0..depth (index l - l0), each Morton-sorted.
/// N_depth is the voxel set. For p=1 a coarse node is the floored ancestor;
/// for p=2 every node whose hat is nonzero at some voxel (open support).
std::vector<std::vector<MortonKey>> build_node_sets(std::span<const MortonKey> voxel_keys, int depth, int order,
                                                    int l0);

/// Edges (i, j) with m_j - 2 n_i in {-1,0,1}^3 and nonzero kernel weight.
TwoScaleLink build_two_scale_link(const BsplineKernel& kernel, int parent_level, std::span<const MortonKey> parents,
                                  std::span<const MortonKey> children);

/// y = A v (child level -> parent level), channel-wise.
Signal apply_A(const TwoScaleLink& link, const Signal& v);
/// y = A^T v (parent level -> child level), channel-wise.
Signal apply_At(const TwoScaleLink& link, const Signal& v);

/// Identity Gram on the finest level.
LevelGraph init_gram_finest(int depth, std::vector<MortonKey> keys);

/// Gram tensor of the parent level, A G_child A^T restricted to the
/// parent's 27-neighborhood. `parent` supplies the parent adjacency.
std::vector<double> propagate_gram(const TwoScaleLink& link, const LevelGraph& child, const LevelGraph& parent);

/// y[i] = sum_k gram(i,k) v[neighbor(i,k)].
Signal apply_gram(const LevelGraph& graph, const Signal& v);

/// Complete level pyramid for one geometry.
struct Hierarchy {
  int order = 1;
  int l0 = 0;
  int depth = 0;
  BsplineKernel kernel;
  std::vector<LevelGraph> graphs;  // l0..depth
  std::vector<TwoScaleLink> links;  // links[l - l0] joins l and l+1

  const LevelGraph& graph(int level) const;
  const TwoScaleLink& link(int parent_level) const;
};

/// Throws ConfigError unless order in {1,2} and 0 <= l0 <= depth.
Hierarchy build_hierarchy(std::span<const MortonKey> voxel_keys, int depth, int order, int l0);

void write_gram_csv(std::ostream& os, const LevelGraph& graph);
void write_link_csv(std::ostream& os, const TwoScaleLink& link);

namespace instrument {
/// Count of sparse operator applications (gram, filter stages) on this thread.
std::size_t& sparse_applications();
}  // namespace instrument

}  // namespace vspc
