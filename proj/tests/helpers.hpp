#pragma once

// Shared generators and independent oracles for the test suites. Oracles
// here must stay independent of the library code paths they check.

#include <algorithm>
#include <numeric>
#include <vector>

#include "crowdsim/consensus.hpp"
#include "crowdsim/hierarchy.hpp"
#include "crowdsim/image.hpp"
#include "crowdsim/rng.hpp"
#include "crowdsim/seg_tree.hpp"

namespace test_helpers {

using namespace crowdsim;

inline SyntheticImage make_image(std::int64_t count, std::uint64_t seed,
                                 Layout layout = Layout::uniform) {
  ImageGenSpec spec;
  spec.count = count;
  spec.layout = layout;
  return generate_image(spec, RngSeed{seed});
}

/// Random laminar hierarchy over n items: ids are shuffled once, then split
/// recursively into contiguous chunks of the shuffled order.
inline Hierarchy random_hierarchy(std::size_t n, Rng& rng,
                                  double split_prob = 0.8,
                                  std::size_t max_fanout = 3) {
  std::vector<ItemId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  for (std::size_t i = n; i > 1; --i)
    std::swap(ids[i - 1], ids[rng.pick(i)]);

  Hierarchy h;
  auto build = [&](auto&& self, std::size_t lo, std::size_t hi,
                   int parent) -> void {
    const int v = static_cast<int>(h.nodes.size());
    std::vector<ItemId> items(ids.begin() + lo, ids.begin() + hi);
    std::sort(items.begin(), items.end());
    h.nodes.push_back({std::move(items), {}, parent});
    if (parent >= 0) h.nodes[parent].children.push_back(v);
    const std::size_t span = hi - lo;
    if (span < 2 || !rng.bernoulli(split_prob)) return;
    const std::size_t ways = 2 + rng.pick(std::min(max_fanout, span) - 1);
    std::vector<std::size_t> cuts{lo, hi};
    while (cuts.size() < ways + 1) {
      const std::size_t c = lo + 1 + rng.pick(span - 1);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
        cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      self(self, cuts[i], cuts[i + 1], v);
  };
  build(build, 0, n, -1);
  h.validate();
  return h;
}

/// Random partition of n items into up to max_clusters nonempty clusters.
inline Clustering random_clustering(std::size_t n, Rng& rng,
                                    std::size_t max_clusters = 5) {
  const std::size_t k = 1 + rng.pick(std::min(max_clusters, n));
  std::vector<std::vector<ItemId>> clusters(k);
  for (std::size_t i = 0; i < n; ++i)
    clusters[rng.pick(k)].push_back(static_cast<ItemId>(i));
  Clustering c;
  for (auto& cl : clusters)
    if (!cl.empty()) c.clusters.push_back(std::move(cl));
  return c;
}

/// Stylized 18-item universe: six shapes in three color runs; shape values
/// group pairwise into three coarse classes, colors stay flat. Dimension 0
/// is shape, dimension 1 is color, and the two induced hierarchies cross.
struct ShapeColorUniverse {
  ItemUniverseSpec spec;
  std::vector<Item> items;
  std::vector<Hierarchy> truth;  // [0] shape, [1] color
};

inline ShapeColorUniverse make_shape_color_universe() {
  ShapeColorUniverse u;
  u.spec.count = 18;
  u.spec.dimensions.push_back(
      {"shape",
       {"square", "rectangle", "scalene", "equilateral", "circle", "ellipse"},
       {{0, 1}, {2, 3}, {4, 5}}});
  u.spec.dimensions.push_back({"color", {"red", "green", "blue"}, {}});
  u.items = generate_items(u.spec);
  u.truth.push_back(dimension_hierarchy(u.spec, u.items, 0));
  u.truth.push_back(dimension_hierarchy(u.spec, u.items, 1));
  return u;
}

/// Fills `region` with `n` small disjoint objects on a grid, appending to
/// the image's object list.
inline void sprinkle_objects(SyntheticImage& img, const Rect& region,
                             int n) {
  const std::int64_t step = 4;
  std::int64_t x = region.x0 + 1, y = region.y0 + 1;
  for (int i = 0; i < n; ++i) {
    if (x + 2 > region.x1) {
      x = region.x0 + 1;
      y += step;
    }
    img.objects.push_back(
        {static_cast<ObjectId>(img.objects.size()), {x, y, x + 2, y + 2}});
    x += step;
  }
}

/// Drill-down fixture: an explicit three-level tree whose per-node truth is
/// (45, 18, 27, 10, 8, 9, 8, 10) in breadth-first id order. Ids 0..7 play
/// the roles V0..V7: 0 -> {1,2}, 1 -> {3,4}, 2 -> {5,6,7}.
struct DrillFixture {
  SyntheticImage image;
  SegTree tree;
};

inline DrillFixture drill_fixture() {
  DrillFixture f;
  f.image.width = 120;
  f.image.height = 100;
  const Rect v3{0, 0, 60, 50}, v4{60, 0, 120, 50};
  const Rect v5{0, 50, 40, 100}, v6{40, 50, 80, 100}, v7{80, 50, 120, 100};
  sprinkle_objects(f.image, v3, 10);
  sprinkle_objects(f.image, v4, 8);
  sprinkle_objects(f.image, v5, 9);
  sprinkle_objects(f.image, v6, 8);
  sprinkle_objects(f.image, v7, 10);
  f.image.validate();

  ExplicitNode root;
  root.rect = {0, 0, 120, 100};
  ExplicitNode n1, n2;
  n1.rect = {0, 0, 120, 50};
  n2.rect = {0, 50, 120, 100};
  n1.children = {ExplicitNode{v3, {}}, ExplicitNode{v4, {}}};
  n2.children = {ExplicitNode{v5, {}}, ExplicitNode{v6, {}},
                 ExplicitNode{v7, {}}};
  root.children = {n1, n2};
  f.tree = build_explicit_tree(root);
  return f;
}

inline CountingWorkerModel zero_error_worker() {
  CountingWorkerModel m;
  m.epsilon = 0.0;
  m.p_small_err = 0.0;
  return m;
}

/// Exhaustive maximum-clique oracle over all 2^n subsets; n <= 20. Among
/// maximum cliques it keeps the lexicographically smallest index set.
inline std::vector<int> brute_force_max_clique(
    int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [a, b] : edges) {
    adj[a] |= 1u << b;
    adj[b] |= 1u << a;
  }
  auto members = [&](std::uint32_t s) {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
      if (s >> v & 1) out.push_back(v);
    return out;
  };
  std::vector<int> best;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    const int size = __builtin_popcount(s);
    if (size < static_cast<int>(best.size())) continue;
    bool clique = true;
    for (int v = 0; v < n && clique; ++v) {
      if (!(s >> v & 1)) continue;
      if ((s & adj[v]) != (s & ~(1u << v))) clique = false;
    }
    if (!clique) continue;
    std::vector<int> cand = members(s);
    if (size > static_cast<int>(best.size()) || cand < best)
      best = std::move(cand);
  }
  return best;
}

}  // namespace test_helpers
