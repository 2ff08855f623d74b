#include "crowdsim/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdsim/errors.hpp"

namespace crowdsim {

void CellPartition::validate() const {
  if (cells.empty()) throw StructureError("partition has no cells");
  for (const Cell& c : cells) {
    if (!c.rect.valid()) throw StructureError("cell has no area");
    if (c.prior < 0) throw StructureError("negative prior");
  }
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (!disjoint(cells[i].rect, cells[j].rect))
        throw StructureError("cells overlap");
  const int n = static_cast<int>(cells.size());
  for (const auto& [a, b] : adjacency) {
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw BoundsError("adjacency index out of range");
    if (a == b) throw StructureError("adjacency must be irreflexive");
  }
}

std::vector<std::vector<int>> CellPartition::neighbor_lists() const {
  std::vector<std::vector<int>> nbr(cells.size());
  for (const auto& [a, b] : adjacency) {
    nbr[a].push_back(b);
    nbr[b].push_back(a);
  }
  for (auto& list : nbr) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return nbr;
}

namespace {

std::vector<CellGroup> group_first_fit(const CellPartition& partition,
                                       std::int64_t k) {
  std::vector<CellGroup> groups;
  for (int i = 0; i < static_cast<int>(partition.cells.size()); ++i) {
    const std::int64_t prior = partition.cells[i].prior;
    if (prior > k) {
      groups.push_back({{i}, prior, true});
      continue;
    }
    bool placed = false;
    for (CellGroup& g : groups) {
      if (g.oversized || g.prior_total + prior > k) continue;
      g.cells.push_back(i);
      g.prior_total += prior;
      placed = true;
      break;
    }
    if (!placed) groups.push_back({{i}, prior, false});
  }
  return groups;
}

std::vector<CellGroup> group_contiguous(const CellPartition& partition,
                                        std::int64_t k) {
  const auto nbr = partition.neighbor_lists();
  const int n = static_cast<int>(partition.cells.size());

  // Fixed adjacency-respecting linear order: DFS preorder from the lowest
  // unvisited index, neighbors in ascending order.
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (auto it = nbr[v].rbegin(); it != nbr[v].rend(); ++it)
        if (!seen[*it]) {
          seen[*it] = 1;
          stack.push_back(*it);
        }
    }
  }

  std::vector<CellGroup> groups;
  auto adjacent_to_group = [&](const CellGroup& g, int cell) {
    for (int member : g.cells)
      if (std::binary_search(nbr[cell].begin(), nbr[cell].end(), member))
        return true;
    return false;
  };
  for (int cell : order) {
    const std::int64_t prior = partition.cells[cell].prior;
    if (prior > k) {
      groups.push_back({{cell}, prior, true});
      continue;
    }
    if (!groups.empty()) {
      CellGroup& g = groups.back();
      if (!g.oversized && g.prior_total + prior <= k &&
          adjacent_to_group(g, cell)) {
        g.cells.push_back(cell);
        g.prior_total += prior;
        continue;
      }
    }
    groups.push_back({{cell}, prior, false});
  }
  return groups;
}

}  // namespace

std::vector<CellGroup> group_cells(const CellPartition& partition,
                                   std::int64_t k, GroupingStrategy strategy) {
  partition.validate();
  if (k < 1) throw ConfigError("grouping threshold must be >= 1");
  return strategy == GroupingStrategy::first_fit
             ? group_first_fit(partition, k)
             : group_contiguous(partition, k);
}

PriorTree build_prior_tree(const std::vector<CellGroup>& groups,
                           const CellPartition& partition, int fanout) {
  if (fanout < 2) throw ConfigError("fanout must be >= 2");
  if (groups.empty()) throw StructureError("no groups");
  std::vector<char> covered(partition.cells.size(), 0);
  for (const CellGroup& g : groups)
    for (int c : g.cells) {
      if (c < 0 || c >= static_cast<int>(partition.cells.size()))
        throw BoundsError("group references an unknown cell");
      covered[c] = 1;
    }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end())
    throw StructureError("groups do not cover all cells");

  auto group_region = [&](const CellGroup& g) {
    std::vector<Rect> parts;
    for (int c : g.cells) parts.push_back(partition.cells[c].rect);
    return RegionSet{std::move(parts)};
  };

  PriorTree out;
  SegTree& tree = out.tree;
  const auto whole = [&] {
    std::vector<Rect> parts;
    for (const Cell& c : partition.cells) parts.push_back(c.rect);
    return RegionSet{std::move(parts)};
  }();
  std::int64_t whole_prior = 0;
  for (const CellGroup& g : groups) whole_prior += g.prior_total;
  tree.nodes.push_back({0, whole, {}, -1, {}, whole_prior});

  // Balanced fanout-ary subdivision of contiguous group ranges, breadth
  // first so ids stay level-ordered. Leaf nodes carry their cells latent
  // with per-cell priors, the recovery path for underestimates.
  struct Range {
    std::size_t lo, hi;  // half-open over groups
    NodeId node;
  };
  std::vector<Range> queue{{0, groups.size(), 0}};
  out.group_nodes.resize(groups.size());
  out.oversized.resize(groups.size());
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const Range r = queue[qi];
    if (r.hi - r.lo == 1) {
      const CellGroup& g = groups[r.lo];
      SegNode& leaf = tree.nodes[r.node];
      leaf.region = group_region(g);
      leaf.prior = g.prior_total;
      if (g.cells.size() > 1)
        for (int c : g.cells)
          leaf.latent.push_back({RegionSet{partition.cells[c].rect},
                                 partition.cells[c].prior});
      out.group_nodes[r.lo] = r.node;
      out.oversized[r.lo] = g.oversized;
      continue;
    }
    const std::size_t span = r.hi - r.lo;
    const std::size_t ways = std::min<std::size_t>(fanout, span);
    for (std::size_t i = 0; i < ways; ++i) {
      const std::size_t lo = r.lo + span * i / ways;
      const std::size_t hi = r.lo + span * (i + 1) / ways;
      const NodeId child = static_cast<NodeId>(tree.nodes.size());
      std::vector<Rect> parts;
      std::int64_t prior = 0;
      for (std::size_t gi = lo; gi < hi; ++gi) {
        prior += groups[gi].prior_total;
        for (int c : groups[gi].cells)
          parts.push_back(partition.cells[c].rect);
      }
      tree.nodes.push_back({child, RegionSet{std::move(parts)}, {},
                            static_cast<std::int32_t>(r.node), {}, prior});
      tree.nodes[r.node].children.push_back(child);
      queue.push_back({lo, hi, child});
    }
  }
  return out;
}

CellPartition grid_partition(const SyntheticImage& image, int grid,
                             double noise, RngSeed seed) {
  if (grid < 1) throw ConfigError("grid must be >= 1");
  if (noise < 0.0) throw ConfigError("noise must be nonnegative");

  CellPartition out;
  std::vector<RegionSet> regions;
  for (int gy = 0; gy < grid; ++gy)
    for (int gx = 0; gx < grid; ++gx) {
      const Rect r{image.width * gx / grid, image.height * gy / grid,
                   image.width * (gx + 1) / grid,
                   image.height * (gy + 1) / grid};
      if (!r.valid()) continue;
      out.cells.push_back({r, 0});
      regions.push_back(RegionSet{r});
    }

  // True per-cell counts via majority assignment over the grid split.
  std::vector<std::size_t> all(image.objects.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::int64_t> counts(out.cells.size(), 0);
  if (!all.empty())
    for (std::size_t owner : assign_majority(image, all, regions))
      ++counts[owner];

  Rng rng(seed);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    const double rel = 1.0 + (rng.uniform() * 2.0 - 1.0) * noise;
    out.cells[i].prior =
        std::max<std::int64_t>(0, std::llround(counts[i] * rel));
  }

  // 4-neighborhood over the surviving grid cells.
  const int cols = grid, rows = grid;
  auto index_of = [&](int gx, int gy) -> int {
    // Cells were pushed row-major; degenerate rows/cols were skipped only
    // when the image is smaller than the grid, which validate() rejects.
    return gy * cols + gx;
  };
  if (static_cast<int>(out.cells.size()) == cols * rows) {
    for (int gy = 0; gy < rows; ++gy)
      for (int gx = 0; gx < cols; ++gx) {
        if (gx + 1 < cols)
          out.adjacency.push_back({index_of(gx, gy), index_of(gx + 1, gy)});
        if (gy + 1 < rows)
          out.adjacency.push_back({index_of(gx, gy), index_of(gx, gy + 1)});
      }
  }
  out.validate();
  return out;
}

}  // namespace crowdsim
