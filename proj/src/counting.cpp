#include "crowdsim/counting.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "crowdsim/errors.hpp"

namespace crowdsim {

std::int64_t aggregate_median(const std::vector<std::int64_t>& answers) {
  if (answers.empty()) throw AggregationError("no answers to aggregate");
  std::vector<std::int64_t> sorted = answers;
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() - 1) / 2];
}

namespace {

/// Working state for a drill-down: a mutable copy of the tree plus the
/// hereditary object assignment, extended on the fly when latent children
/// materialize.
struct DrillState {
  SegTree tree;
  const SyntheticImage* image;
  std::vector<std::vector<std::size_t>> owned;

  explicit DrillState(const SegTree& t, const SyntheticImage& img)
      : tree(t), image(&img) {
    owned.resize(tree.nodes.size());
    owned[0].resize(img.objects.size());
    std::iota(owned[0].begin(), owned[0].end(), 0);
  }

  std::int64_t count(NodeId v) const {
    return static_cast<std::int64_t>(owned[v].size());
  }

  /// Makes v's children real (materializing latent regions if needed) and
  /// hands v's objects down by majority area. Returns the child ids, empty
  /// when v has nothing to expand into.
  std::vector<NodeId> expand(NodeId v) {
    SegNode& n = tree.nodes[v];
    if (n.children.empty() && !n.latent.empty()) {
      const std::vector<LatentChild> latent = std::move(n.latent);
      tree.nodes[v].latent.clear();
      for (const LatentChild& c : latent) {
        const NodeId child = static_cast<NodeId>(tree.nodes.size());
        tree.nodes.push_back({child, c.region, {},
                              static_cast<std::int32_t>(v), {}, c.prior});
        owned.emplace_back();
        tree.nodes[v].children.push_back(child);
      }
    }
    const std::vector<NodeId>& children = tree.nodes[v].children;
    if (children.empty()) return {};
    if (owned[children.front()].empty() && !owned[v].empty()) {
      std::vector<RegionSet> regions;
      regions.reserve(children.size());
      for (NodeId c : children) regions.push_back(tree.nodes[c].region);
      const auto pick = assign_majority(*image, owned[v], regions);
      for (std::size_t i = 0; i < owned[v].size(); ++i)
        owned[children[pick[i]]].push_back(owned[v][i]);
    }
    return children;
  }
};

}  // namespace

CountRunReport frontier_count(const SegTree& tree, const SyntheticImage& image,
                              const CountingPanel& panel, std::int64_t k,
                              int answers_per_question, RngSeed seed) {
  if (answers_per_question < 1)
    throw ConfigError("answers_per_question must be >= 1");
  if (panel.adversarial > answers_per_question)
    throw ConfigError("more adversarial slots than answers per question");

  DrillState state(tree, image);
  CountRunReport report;
  std::deque<NodeId> queue{0};
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();

    // A node whose prior estimate already meets the threshold is expanded
    // without spending a question: its answer could only say ">= k".
    const SegNode& node = state.tree.nodes[v];
    if (node.prior >= k && (!node.children.empty() || !node.latent.empty())) {
      for (NodeId c : state.expand(v)) queue.push_back(c);
      continue;
    }

    CountQuestion q;
    q.node = v;
    const std::int64_t truth = state.count(v);
    for (int a = 0; a < answers_per_question; ++a) {
      const RngSeed s = derive(seed, v, static_cast<std::uint64_t>(a));
      if (a >= answers_per_question - panel.adversarial) {
        Rng rng(s);
        q.answers.push_back(rng.uniform_int(panel.adv_lo, panel.adv_hi));
      } else {
        q.answers.push_back(answer_count(panel.honest, truth, s));
      }
    }
    q.aggregate = aggregate_median(q.answers);
    report.total_tasks += answers_per_question;

    if (q.aggregate >= k) {
      const auto children = state.expand(v);
      if (children.empty()) {
        report.final_frontier.nodes.push_back(v);
        report.final_count += q.aggregate;
        report.saturated.push_back(v);
      } else {
        for (NodeId c : children) queue.push_back(c);
      }
    } else {
      report.final_frontier.nodes.push_back(v);
      report.final_count += q.aggregate;
    }
    report.questions.push_back(std::move(q));
  }
  report.queried_tree = std::move(state.tree);
  return report;
}

FrontierOracle minimal_frontier_oracle(const SegTree& tree,
                                       const SyntheticImage& image,
                                       std::int64_t k) {
  DrillState state(tree, image);
  FrontierOracle oracle;
  std::deque<NodeId> queue{0};
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (state.count(v) < k) {
      oracle.frontier.nodes.push_back(v);
      continue;
    }
    const auto children = state.expand(v);
    if (children.empty()) {
      oracle.frontier.nodes.push_back(v);
      oracle.saturated.push_back(v);
    } else {
      for (NodeId c : children) queue.push_back(c);
    }
  }
  oracle.queried_tree = std::move(state.tree);
  return oracle;
}

std::vector<NodeId> ancestor_closure(const SegTree& tree,
                                     const FrontierSet& frontier) {
  std::vector<char> in(tree.nodes.size(), 0);
  for (NodeId v : frontier.nodes) {
    std::int32_t cur = static_cast<std::int32_t>(v);
    while (cur >= 0 && !in[cur]) {
      in[cur] = 1;
      cur = tree.nodes[cur].parent;
    }
  }
  std::vector<NodeId> out;
  for (NodeId v = 0; v < tree.nodes.size(); ++v)
    if (in[v]) out.push_back(v);
  return out;
}

}  // namespace crowdsim
