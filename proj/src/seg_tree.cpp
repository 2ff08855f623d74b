#include "crowdsim/seg_tree.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "crowdsim/errors.hpp"

namespace crowdsim {

void SegTree::validate() const {
  if (nodes.empty()) throw StructureError("tree has no nodes");
  for (const SegNode& n : nodes) {
    if (n.region.area() <= 0) throw StructureError("node region has no area");
    if (n.children.empty()) continue;
    std::int64_t child_area = 0;
    std::vector<Rect> cover;
    for (NodeId c : n.children) {
      const SegNode& child = nodes.at(c);
      if (child.parent != static_cast<std::int32_t>(n.id))
        throw StructureError("child/parent links disagree");
      child_area += child.region.area();
      cover.insert(cover.end(), child.region.parts.begin(),
                   child.region.parts.end());
    }
    if (child_area != n.region.area())
      throw StructureError("children do not tile the parent (area)");
    for (std::size_t i = 0; i < cover.size(); ++i)
      for (std::size_t j = i + 1; j < cover.size(); ++j)
        if (!disjoint(cover[i], cover[j]))
          throw StructureError("children overlap");
    for (const Rect& part : n.region.parts)
      if (!covered_by(part, cover))
        throw StructureError("children do not cover the parent");
  }
}

namespace {

std::vector<Rect> split_rect(const Rect& r, int fanout) {
  std::vector<Rect> out;
  if (r.width() >= r.height()) {
    const std::int64_t w = r.width();
    for (int i = 0; i < fanout; ++i) {
      const std::int64_t a = r.x0 + w * i / fanout;
      const std::int64_t b = r.x0 + w * (i + 1) / fanout;
      if (b > a) out.push_back({a, r.y0, b, r.y1});
    }
  } else {
    const std::int64_t h = r.height();
    for (int i = 0; i < fanout; ++i) {
      const std::int64_t a = r.y0 + h * i / fanout;
      const std::int64_t b = r.y0 + h * (i + 1) / fanout;
      if (b > a) out.push_back({r.x0, a, r.x1, b});
    }
  }
  return out;
}

}  // namespace

SegTree build_tree(const SyntheticImage& image, const MidpointPolicy& policy) {
  if (image.width <= 0 || image.height <= 0)
    throw StructureError("image has no area");
  if (policy.fanout < 2) throw ConfigError("fanout must be >= 2");
  if (policy.leaf_area < 1) throw ConfigError("leaf area must be >= 1");

  SegTree tree;
  tree.nodes.push_back({0, RegionSet{image.bounds()}, {}, -1, {}, -1});
  // Breadth-first construction keeps ids level-ordered.
  std::deque<NodeId> queue{0};
  while (!queue.empty()) {
    const NodeId id = queue.front();
    queue.pop_front();
    const Rect r = tree.nodes[id].region.parts.front();
    if (r.area() < policy.leaf_area) continue;
    const auto pieces = split_rect(r, policy.fanout);
    if (pieces.size() < 2) continue;  // unsplittable sliver
    for (const Rect& piece : pieces) {
      const NodeId child = static_cast<NodeId>(tree.nodes.size());
      tree.nodes.push_back({child, RegionSet{piece}, {},
                            static_cast<std::int32_t>(id), {}, -1});
      tree.nodes[id].children.push_back(child);
      queue.push_back(child);
    }
  }
  return tree;
}

SegTree build_explicit_tree(const ExplicitNode& root) {
  SegTree tree;
  tree.nodes.push_back({0, RegionSet{root.rect}, {}, -1, {}, -1});
  std::deque<std::pair<const ExplicitNode*, NodeId>> queue{{&root, 0}};
  while (!queue.empty()) {
    auto [node, id] = queue.front();
    queue.pop_front();
    for (const ExplicitNode& c : node->children) {
      const NodeId child = static_cast<NodeId>(tree.nodes.size());
      tree.nodes.push_back({child, RegionSet{c.rect}, {},
                            static_cast<std::int32_t>(id), {}, -1});
      tree.nodes[id].children.push_back(child);
      queue.push_back({&c, child});
    }
  }
  tree.validate();
  return tree;
}

void validate_frontier(const SegTree& tree, const FrontierSet& f) {
  // No ancestor-descendant pairs, and regions tile the root exactly.
  std::vector<char> chosen(tree.nodes.size(), 0);
  std::int64_t area = 0;
  for (NodeId v : f.nodes) {
    if (v >= tree.nodes.size()) throw StructureError("frontier node unknown");
    if (chosen[v]) throw StructureError("duplicate frontier node");
    chosen[v] = 1;
    area += tree.nodes[v].region.area();
  }
  for (NodeId v : f.nodes) {
    std::int32_t p = tree.nodes[v].parent;
    while (p >= 0) {
      if (chosen[p]) throw StructureError("frontier contains an ancestor");
      p = tree.nodes[p].parent;
    }
  }
  if (area != tree.root().region.area())
    throw StructureError("frontier regions do not tile the image");
  std::vector<Rect> cover;
  for (NodeId v : f.nodes)
    cover.insert(cover.end(), tree.nodes[v].region.parts.begin(),
                 tree.nodes[v].region.parts.end());
  for (std::size_t i = 0; i < cover.size(); ++i)
    for (std::size_t j = i + 1; j < cover.size(); ++j)
      if (!disjoint(cover[i], cover[j]))
        throw StructureError("frontier regions overlap");
}

std::vector<std::int64_t> assigned_counts(const SegTree& tree,
                                          const SyntheticImage& image) {
  std::vector<std::vector<std::size_t>> owned(tree.nodes.size());
  owned[0].resize(image.objects.size());
  std::iota(owned[0].begin(), owned[0].end(), 0);

  for (NodeId v = 0; v < tree.nodes.size(); ++v) {
    const SegNode& n = tree.nodes[v];
    if (n.children.empty() || owned[v].empty()) continue;
    std::vector<RegionSet> regions;
    regions.reserve(n.children.size());
    for (NodeId c : n.children) regions.push_back(tree.nodes[c].region);
    const auto pick = assign_majority(image, owned[v], regions);
    for (std::size_t i = 0; i < owned[v].size(); ++i)
      owned[n.children[pick[i]]].push_back(owned[v][i]);
  }

  std::vector<std::int64_t> counts(tree.nodes.size());
  for (NodeId v = 0; v < tree.nodes.size(); ++v)
    counts[v] = static_cast<std::int64_t>(owned[v].size());
  return counts;
}

}  // namespace crowdsim
