#include "crowdsim/hierarchy.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "crowdsim/errors.hpp"

namespace crowdsim {

namespace {

std::vector<ItemId> sorted(std::vector<ItemId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

int Hierarchy::depth(int v) const {
  int d = 0;
  while (nodes[v].parent >= 0) {
    v = nodes[v].parent;
    ++d;
  }
  return d;
}

void Hierarchy::validate() const {
  if (nodes.empty()) throw StructureError("hierarchy has no nodes");
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    const Node& n = nodes[v];
    if (n.items.empty()) throw StructureError("hierarchy node with no items");
    if (!std::is_sorted(n.items.begin(), n.items.end()))
      throw StructureError("hierarchy node items not sorted");
    if (std::adjacent_find(n.items.begin(), n.items.end()) != n.items.end())
      throw StructureError("duplicate item in hierarchy node");
    if (n.children.empty()) continue;
    std::vector<ItemId> merged;
    for (int c : n.children) {
      if (nodes[c].parent != static_cast<int>(v))
        throw StructureError("child/parent links disagree");
      merged.insert(merged.end(), nodes[c].items.begin(),
                    nodes[c].items.end());
    }
    std::sort(merged.begin(), merged.end());
    if (merged != n.items)
      throw StructureError("children do not partition their parent");
  }
}

std::vector<ItemId> Clustering::universe() const {
  std::vector<ItemId> all;
  for (const auto& c : clusters) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  return all;
}

void Clustering::validate() const {
  std::vector<ItemId> all;
  for (const auto& c : clusters) {
    if (c.empty()) throw StructureError("empty cluster");
    if (!std::is_sorted(c.begin(), c.end()))
      throw StructureError("cluster items not sorted");
    all.insert(all.end(), c.begin(), c.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw StructureError("clusters are not disjoint");
}

Hierarchy flat_hierarchy(const std::vector<std::vector<ItemId>>& leaves) {
  std::vector<std::vector<int>> grouping;  // none
  return hierarchy_from_leaves(leaves, grouping);
}

Hierarchy hierarchy_from_leaves(const std::vector<std::vector<ItemId>>& leaves,
                                const std::vector<std::vector<int>>& grouping) {
  Hierarchy h;
  std::vector<ItemId> all;
  for (const auto& leaf : leaves) all.insert(all.end(), leaf.begin(), leaf.end());
  h.nodes.push_back({sorted(all), {}, -1});

  auto add_leaf = [&](int parent, const std::vector<ItemId>& items) {
    const int id = static_cast<int>(h.nodes.size());
    h.nodes.push_back({sorted(items), {}, parent});
    h.nodes[parent].children.push_back(id);
  };

  if (grouping.empty()) {
    for (const auto& leaf : leaves) add_leaf(0, leaf);
  } else {
    for (const auto& group : grouping) {
      std::vector<ItemId> merged;
      for (int leaf_idx : group)
        merged.insert(merged.end(), leaves.at(leaf_idx).begin(),
                      leaves.at(leaf_idx).end());
      const int mid = static_cast<int>(h.nodes.size());
      h.nodes.push_back({sorted(merged), {}, 0});
      h.nodes[0].children.push_back(mid);
      if (group.size() > 1)
        for (int leaf_idx : group) add_leaf(mid, leaves.at(leaf_idx));
    }
  }
  h.validate();
  return h;
}

Hierarchy hierarchy_from_family(std::vector<std::vector<ItemId>> family,
                                const std::vector<ItemId>& universe,
                                bool complete) {
  for (auto& s : family) std::sort(s.begin(), s.end());
  std::vector<ItemId> root = universe;
  std::sort(root.begin(), root.end());

  // Dedup; drop the universe if present (re-added as the root).
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
  std::erase(family, root);

  // Largest first so parents are placed before their children.
  std::stable_sort(family.begin(), family.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });

  Hierarchy h;
  h.nodes.push_back({root, {}, -1});
  for (const auto& set : family) {
    if (set.empty()) throw StructureError("empty set in laminar family");
    if (!std::includes(root.begin(), root.end(), set.begin(), set.end()))
      throw DomainMismatchError("family set not within the universe");
    // Parent: the deepest already-placed node containing the set.
    int parent = 0;
    bool descended = true;
    while (descended) {
      descended = false;
      for (int c : h.nodes[parent].children) {
        const auto& cs = h.nodes[c].items;
        if (std::includes(cs.begin(), cs.end(), set.begin(), set.end())) {
          parent = c;
          descended = true;
          break;
        }
      }
    }
    // Laminarity: the set must not straddle any sibling.
    for (int c : h.nodes[parent].children) {
      const auto& cs = h.nodes[c].items;
      std::vector<ItemId> inter;
      std::set_intersection(cs.begin(), cs.end(), set.begin(), set.end(),
                            std::back_inserter(inter));
      if (!inter.empty())
        throw StructureError("family is not laminar");
    }
    const int id = static_cast<int>(h.nodes.size());
    h.nodes.push_back({set, {}, parent});
    h.nodes[parent].children.push_back(id);
  }

  if (complete) {
    // Add singleton leaves wherever children fail to cover their parent.
    const std::size_t original = h.nodes.size();
    for (std::size_t v = 0; v < original; ++v) {
      if (h.nodes[v].children.empty()) continue;
      std::vector<ItemId> covered;
      for (int c : h.nodes[v].children)
        covered.insert(covered.end(), h.nodes[c].items.begin(),
                       h.nodes[c].items.end());
      std::sort(covered.begin(), covered.end());
      std::vector<ItemId> missing;
      std::set_difference(h.nodes[v].items.begin(), h.nodes[v].items.end(),
                          covered.begin(), covered.end(),
                          std::back_inserter(missing));
      for (ItemId item : missing) {
        const int id = static_cast<int>(h.nodes.size());
        h.nodes.push_back({{item}, {}, static_cast<int>(v)});
        h.nodes[v].children.push_back(id);
      }
    }
  }

  // Deterministic child order: by first item.
  for (auto& n : h.nodes)
    std::sort(n.children.begin(), n.children.end(), [&](int a, int b) {
      return h.nodes[a].items.front() < h.nodes[b].items.front();
    });
  if (complete) h.validate();
  return h;
}

Hierarchy dimension_hierarchy(const ItemUniverseSpec& spec,
                              const std::vector<Item>& items,
                              std::size_t dim) {
  if (dim >= spec.dimensions.size()) throw BoundsError("no such dimension");
  const Dimension& d = spec.dimensions[dim];
  std::vector<std::vector<ItemId>> leaves(d.values.size());
  for (const Item& it : items)
    leaves[item_value(spec, it, dim)].push_back(it.id);
  std::vector<std::vector<ItemId>> nonempty;
  std::vector<int> value_to_leaf(d.values.size(), -1);
  for (std::size_t v = 0; v < leaves.size(); ++v)
    if (!leaves[v].empty()) {
      value_to_leaf[v] = static_cast<int>(nonempty.size());
      nonempty.push_back(leaves[v]);
    }
  std::vector<std::vector<int>> grouping;
  for (const auto& group : d.groups) {
    std::vector<int> g;
    for (int v : group)
      if (value_to_leaf.at(v) >= 0) g.push_back(value_to_leaf[v]);
    if (!g.empty()) grouping.push_back(g);
  }
  return hierarchy_from_leaves(nonempty, grouping);
}

void validate_frontier(const Hierarchy& h, const HFrontier& f) {
  if (h.empty()) throw StructureError("frontier of an empty hierarchy");
  std::vector<char> in(h.nodes.size(), 0);
  for (int v : f.nodes) {
    if (v < 0 || v >= static_cast<int>(h.nodes.size()))
      throw StructureError("frontier node out of range");
    if (in[v]) throw StructureError("duplicate frontier node");
    in[v] = 1;
  }
  // Every root-to-leaf path must cross the frontier exactly once.
  auto check = [&](auto&& self, int v, bool covered) -> void {
    if (in[v]) {
      if (covered) throw StructureError("frontier nodes on one path");
      covered = true;
    }
    if (h.is_leaf(v)) {
      if (!covered) throw StructureError("frontier misses a leaf path");
      return;
    }
    for (int c : h.nodes[v].children) self(self, c, covered);
  };
  check(check, 0, false);
}

HFrontier leaf_frontier(const Hierarchy& h) {
  HFrontier f;
  for (std::size_t v = 0; v < h.nodes.size(); ++v)
    if (h.is_leaf(static_cast<int>(v))) f.nodes.push_back(static_cast<int>(v));
  return f;
}

HFrontier depth_frontier(const Hierarchy& h, int depth) {
  HFrontier f;
  auto walk = [&](auto&& self, int v, int d) -> void {
    if (d == depth || h.is_leaf(v)) {
      f.nodes.push_back(v);
      return;
    }
    for (int c : h.nodes[v].children) self(self, c, d + 1);
  };
  walk(walk, 0, 0);
  return f;
}

Clustering frontier_clustering(const Hierarchy& h, const HFrontier& f) {
  validate_frontier(h, f);
  Clustering c;
  for (int v : f.nodes) c.clusters.push_back(h.nodes[v].items);
  return c;
}

bool is_consistent(const Clustering& a, const Clustering& b) {
  if (a.universe() != b.universe())
    throw DomainMismatchError("clusterings cover different item sets");

  std::unordered_map<ItemId, int> b_index;
  for (std::size_t j = 0; j < b.clusters.size(); ++j)
    for (ItemId item : b.clusters[j]) b_index[item] = static_cast<int>(j);

  // For each cluster A, tally |A ∩ B| per touched B; consistency requires
  // every touched pair to satisfy A ⊆ B or B ⊆ A.
  std::unordered_map<int, std::size_t> overlap;
  for (const auto& ca : a.clusters) {
    overlap.clear();
    for (ItemId item : ca) ++overlap[b_index.at(item)];
    for (const auto& [j, s] : overlap)
      if (s != ca.size() && s != b.clusters[j].size()) return false;
  }
  return true;
}

std::uint64_t count_frontiers(const Hierarchy& h) {
  constexpr std::uint64_t kMax = ~0ULL >> 1;
  auto walk = [&](auto&& self, int v) -> std::uint64_t {
    if (h.is_leaf(v)) return 1;
    std::uint64_t prod = 1;
    for (int c : h.nodes[v].children) {
      const std::uint64_t f = self(self, c);
      if (prod > kMax / f) return kMax;
      prod *= f;
    }
    return prod >= kMax ? kMax : prod + 1;
  };
  return h.empty() ? 0 : walk(walk, 0);
}

std::vector<HFrontier> enumerate_frontiers(const Hierarchy& h) {
  if (count_frontiers(h) > (1ULL << 24))
    throw CapacityError("hierarchy admits more than 2^24 frontiers");

  auto walk = [&](auto&& self, int v) -> std::vector<std::vector<int>> {
    std::vector<std::vector<int>> out{{v}};
    if (h.is_leaf(v)) return out;
    std::vector<std::vector<std::vector<int>>> per_child;
    for (int c : h.nodes[v].children) per_child.push_back(self(self, c));
    // Cartesian product across children, last child varying fastest.
    std::vector<std::size_t> idx(per_child.size(), 0);
    bool done = false;
    while (!done) {
      std::vector<int> combined;
      for (std::size_t i = 0; i < per_child.size(); ++i)
        combined.insert(combined.end(), per_child[i][idx[i]].begin(),
                        per_child[i][idx[i]].end());
      out.push_back(std::move(combined));
      done = true;
      for (std::size_t i = per_child.size(); i-- > 0;) {
        if (++idx[i] < per_child[i].size()) {
          done = false;
          break;
        }
        idx[i] = 0;
      }
    }
    return out;
  };

  std::vector<HFrontier> result;
  if (h.empty()) return result;
  for (auto& nodes : walk(walk, 0)) result.push_back(HFrontier{std::move(nodes)});
  return result;
}

}  // namespace crowdsim
