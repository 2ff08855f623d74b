#pragma once

#include <cstdint>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/image.hpp"

namespace crowdsim {

/// Latent child: a region that materializes as a real node only when its
/// parent has to expand at query time.
struct LatentChild {
  RegionSet region;
  std::int64_t prior = -1;
};

/// One segment of the image. Children's regions are disjoint and exactly
/// tile the parent region. `latent` holds child regions that are not part
/// of the planned tree but may be materialized at query time (prior-planned
/// groups expanding into their cells). `prior` is an externally estimated
/// count, -1 when unknown; a node whose prior already meets the drill-down
/// threshold is expanded without spending a question on it.
struct SegNode {
  NodeId id = 0;
  RegionSet region;
  std::vector<NodeId> children;
  std::int32_t parent = -1;
  std::vector<LatentChild> latent;
  std::int64_t prior = -1;

  bool is_leaf() const { return children.empty(); }
};

/// Segmentation tree; node ids index into `nodes`, root is node 0.
/// Ids are assigned in breadth-first order.
struct SegTree {
  std::vector<SegNode> nodes;

  const SegNode& root() const { return nodes.front(); }
  /// Checks that children tile their parents; throws on failure.
  void validate() const;
};

/// Recursive split of the longer dimension into `fanout` near-equal stripes,
/// stopping once a region's area drops below `leaf_area`.
struct MidpointPolicy {
  std::int64_t leaf_area = 64;
  int fanout = 2;
};

SegTree build_tree(const SyntheticImage& image, const MidpointPolicy& policy);

/// Explicit tree structure for fixtures and file-loaded trees.
struct ExplicitNode {
  Rect rect;
  std::vector<ExplicitNode> children;
};

SegTree build_explicit_tree(const ExplicitNode& root);

/// Mutually exclusive nodes whose regions reassemble the root region.
struct FrontierSet {
  std::vector<NodeId> nodes;

  friend bool operator==(const FrontierSet&, const FrontierSet&) = default;
};

/// Throws StructureError unless `f` is a valid frontier of `tree`.
void validate_frontier(const SegTree& tree, const FrontierSet& f);

/// Ground-truth object count per node, assigned hereditarily: the root owns
/// every object, and each split hands an object to the child with the
/// majority of its remaining area (ties to the lexicographically smallest
/// piece corner). Sums are therefore preserved across every split, which is
/// what makes frontier totals equal the root count.
std::vector<std::int64_t> assigned_counts(const SegTree& tree,
                                          const SyntheticImage& image);

}  // namespace crowdsim
