#pragma once

#include <cstdint>
#include <vector>

#include "crowdsim/image.hpp"
#include "crowdsim/seg_tree.hpp"

namespace crowdsim {

/// Atomic image cell with an externally estimated prior count.
struct Cell {
  Region rect;
  std::int64_t prior = 0;
};

/// Disjoint cells tiling the image, with a symmetric adjacency relation.
struct CellPartition {
  std::vector<Cell> cells;
  std::vector<std::pair<int, int>> adjacency;

  void validate() const;
  std::vector<std::vector<int>> neighbor_lists() const;
};

/// Cells grouped so each group's prior total stays within the threshold.
/// A single cell whose own prior exceeds the threshold becomes a singleton
/// group flagged oversized.
struct CellGroup {
  std::vector<int> cells;
  std::int64_t prior_total = 0;
  bool oversized = false;
};

enum class GroupingStrategy { first_fit, contiguous_greedy };

/// first_fit: cells in index order go into the first group with room,
/// ignoring adjacency. contiguous_greedy: cells in a DFS order over the
/// adjacency graph; a group grows while the next cell is adjacent to it and
/// fits, so every group is connected.
std::vector<CellGroup> group_cells(const CellPartition& partition,
                                   std::int64_t k, GroupingStrategy strategy);

struct PriorTree {
  SegTree tree;
  /// Planned-leaf nodes, one per group, in group order.
  std::vector<NodeId> group_nodes;
  std::vector<bool> oversized;
};

/// Balanced fanout-ary tree over the groups. Group leaves carry their
/// member cells as latent children, the recovery path for priors that
/// underestimated the truth.
PriorTree build_prior_tree(const std::vector<CellGroup>& groups,
                           const CellPartition& partition, int fanout);

/// Grid partition of an image with per-cell priors obtained by perturbing
/// the ground-truth cell counts by a relative error uniform in
/// [-noise, +noise]. Adjacency is the 4-neighborhood.
CellPartition grid_partition(const SyntheticImage& image, int grid,
                             double noise, RngSeed seed);

}  // namespace crowdsim
