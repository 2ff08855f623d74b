#pragma once

#include <cstdint>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/items.hpp"

namespace crowdsim {

/// Laminar tree of item sets: one clustering perspective at every
/// granularity. Children of a node partition the node's items; any two node
/// sets in the tree are nested or disjoint. Node 0 is the root and carries
/// all items. Item vectors are kept sorted.
struct Hierarchy {
  struct Node {
    std::vector<ItemId> items;
    std::vector<int> children;
    int parent = -1;
  };
  std::vector<Node> nodes;

  bool empty() const { return nodes.empty(); }
  bool is_leaf(int v) const { return nodes[v].children.empty(); }
  const std::vector<ItemId>& universe() const { return nodes.front().items; }
  int depth(int v) const;

  /// Checks the partition and laminarity invariants; throws on failure.
  void validate() const;
};

/// A cut through a hierarchy: an antichain of nodes covering every
/// root-to-leaf path. One valid granularity of clustering.
struct HFrontier {
  std::vector<int> nodes;

  friend bool operator==(const HFrontier&, const HFrontier&) = default;
};

/// One worker's partition of an item set into disjoint, nonempty clusters.
/// Cluster item vectors are kept sorted.
struct Clustering {
  WorkerId worker = 0;
  std::vector<std::vector<ItemId>> clusters;

  std::vector<ItemId> universe() const;
  /// Checks disjointness and nonemptiness; throws on failure.
  void validate() const;
};

/// Builds a hierarchy from nested leaf item sets. Each entry of `layout` is
/// one node given as (parent index into layout, items for leaves). Simpler
/// builders below cover the common cases.
Hierarchy hierarchy_from_leaves(
    const std::vector<std::vector<ItemId>>& leaves,
    const std::vector<std::vector<int>>& grouping);

/// Two-level hierarchy: root over the given leaf clusters.
Hierarchy flat_hierarchy(const std::vector<std::vector<ItemId>>& leaves);

/// Builds a hierarchy from a laminar family of item sets. The family need
/// not contain the universe; it is added as the root. Throws StructureError
/// if the family is not laminar. When `complete` is set, missing singletons
/// are appended so children always partition their parent.
Hierarchy hierarchy_from_family(std::vector<std::vector<ItemId>> family,
                                const std::vector<ItemId>& universe,
                                bool complete);

/// Ground-truth hierarchy induced by one dimension of an item universe:
/// root -> value groups (if the dimension has any) -> per-value leaves.
Hierarchy dimension_hierarchy(const ItemUniverseSpec& spec,
                              const std::vector<Item>& items,
                              std::size_t dim);

/// Throws StructureError unless `f` is a valid frontier of `h`.
void validate_frontier(const Hierarchy& h, const HFrontier& f);

HFrontier leaf_frontier(const Hierarchy& h);

/// Frontier of all nodes at `depth`, with shallower leaves kept as-is.
HFrontier depth_frontier(const Hierarchy& h, int depth);

/// The clustering read off a frontier: one cluster per frontier node.
Clustering frontier_clustering(const Hierarchy& h, const HFrontier& f);

/// Whether every cross pair of clusters is nested or disjoint, i.e. each
/// cluster generalizes, specializes, or does not overlap the other
/// clustering's clusters. Symmetric and reflexive; not transitive.
bool is_consistent(const Clustering& a, const Clustering& b);

/// Number of frontiers by the recurrence F(v) = 1 + prod F(child),
/// F(leaf) = 1. Saturates at 2^63-1.
std::uint64_t count_frontiers(const Hierarchy& h);

/// All valid frontiers, each exactly once, in a deterministic order. Throws
/// CapacityError when the hierarchy admits more than 2^24 frontiers.
std::vector<HFrontier> enumerate_frontiers(const Hierarchy& h);

}  // namespace crowdsim
