#include "crowdsim/consensus.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

#include "crowdsim/errors.hpp"

namespace crowdsim {

ClusteringGraph build_clustering_graph(std::vector<Clustering> workers) {
  ClusteringGraph g;
  g.workers = std::move(workers);
  if (g.workers.empty()) return g;
  const auto universe = g.workers.front().universe();
  for (const Clustering& w : g.workers) {
    w.validate();
    if (w.universe() != universe)
      throw DomainMismatchError("workers cluster different item sets");
  }
  const int n = static_cast<int>(g.workers.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (is_consistent(g.workers[i], g.workers[j])) g.edges.push_back({i, j});
  return g;
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct BitOps {
  std::size_t words;

  Bits empty() const { return Bits(words, 0); }
  static void set(Bits& b, int v) { b[v >> 6] |= 1ULL << (v & 63); }
  static bool test(const Bits& b, int v) {
    return (b[v >> 6] >> (v & 63)) & 1ULL;
  }
  static bool none(const Bits& b) {
    for (auto w : b)
      if (w) return false;
    return true;
  }
  static int count(const Bits& b) {
    int c = 0;
    for (auto w : b) c += __builtin_popcountll(w);
    return c;
  }
  Bits and_(const Bits& a, const Bits& b) const {
    Bits out(words);
    for (std::size_t i = 0; i < words; ++i) out[i] = a[i] & b[i];
    return out;
  }
};

/// Branch and bound over (R, P, X) with a pivot chosen to minimize
/// branching; prunes only when |R| + |P| cannot reach the incumbent size,
/// so all maximum cliques stay reachable for the lexicographic tie-break.
struct CliqueSearch {
  int n;
  std::vector<Bits> adj;
  BitOps ops;
  std::vector<int> best;

  void consider(const std::vector<int>& r) {
    if (r.size() < best.size()) return;
    // Branch order follows the pivot, not the indices, so sort before the
    // lexicographic comparison.
    std::vector<int> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    if (r.size() > best.size() || sorted < best) best = std::move(sorted);
  }

  void expand(std::vector<int>& r, Bits p, Bits x) {
    if (BitOps::none(p) && BitOps::none(x)) {
      consider(r);
      return;
    }
    if (r.size() + static_cast<std::size_t>(BitOps::count(p)) < best.size())
      return;

    // Pivot: vertex of P ∪ X with the most neighbours in P.
    int pivot = -1, best_deg = -1;
    for (int v = 0; v < n; ++v) {
      if (!BitOps::test(p, v) && !BitOps::test(x, v)) continue;
      const int deg = BitOps::count(ops.and_(p, adj[v]));
      if (deg > best_deg) {
        best_deg = deg;
        pivot = v;
      }
    }
    for (int v = 0; v < n; ++v) {
      if (!BitOps::test(p, v) || BitOps::test(adj[pivot], v)) continue;
      r.push_back(v);
      expand(r, ops.and_(p, adj[v]), ops.and_(x, adj[v]));
      r.pop_back();
      p[v >> 6] &= ~(1ULL << (v & 63));
      BitOps::set(x, v);
    }
  }
};

}  // namespace

std::vector<int> max_clique(int n,
                            const std::vector<std::pair<int, int>>& edges) {
  if (n <= 0) return {};
  CliqueSearch s;
  s.n = n;
  s.ops.words = static_cast<std::size_t>((n + 63) / 64);
  s.adj.assign(n, s.ops.empty());
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw BoundsError("edge endpoint out of range");
    if (a == b) continue;
    BitOps::set(s.adj[a], b);
    BitOps::set(s.adj[b], a);
  }
  Bits p = s.ops.empty();
  for (int v = 0; v < n; ++v) BitOps::set(p, v);
  std::vector<int> r;
  s.expand(r, std::move(p), s.ops.empty());
  return s.best;
}

std::vector<int> max_clique(const ClusteringGraph& g) {
  return max_clique(static_cast<int>(g.workers.size()), g.edges);
}

ConsensusHierarchy assemble_consensus(const std::vector<Clustering>& workers,
                                      const std::vector<ItemId>& universe) {
  for (std::size_t i = 0; i < workers.size(); ++i)
    for (std::size_t j = i + 1; j < workers.size(); ++j)
      if (!is_consistent(workers[i], workers[j]))
        throw StructureError("consensus requires pairwise-consistent input");

  std::vector<ItemId> root = universe;
  std::sort(root.begin(), root.end());

  std::map<std::vector<ItemId>, std::int64_t> votes;
  for (const Clustering& w : workers)
    for (const auto& cluster : w.clusters) ++votes[cluster];

  std::vector<std::vector<ItemId>> family;
  family.reserve(votes.size());
  for (const auto& [set, v] : votes) family.push_back(set);

  ConsensusHierarchy ch;
  ch.tree = hierarchy_from_family(std::move(family), root, /*complete=*/true);
  ch.votes.resize(ch.tree.nodes.size(), 0);
  for (std::size_t v = 0; v < ch.tree.nodes.size(); ++v) {
    const auto it = votes.find(ch.tree.nodes[v].items);
    if (it != votes.end()) ch.votes[v] = it->second;
  }
  return ch;
}

std::int64_t frontier_votes(const ConsensusHierarchy& ch, const HFrontier& f) {
  std::int64_t total = 0;
  for (int v : f.nodes) total += ch.votes.at(v);
  return total;
}

HFrontier ml_frontier(const ConsensusHierarchy& ch) {
  if (ch.tree.empty()) throw StructureError("empty consensus hierarchy");
  const Hierarchy& h = ch.tree;
  std::vector<std::int64_t> best(h.nodes.size());
  std::vector<char> take_node(h.nodes.size());

  auto solve = [&](auto&& self, int v) -> std::int64_t {
    if (h.is_leaf(v)) {
      best[v] = ch.votes[v];
      take_node[v] = 1;
      return best[v];
    }
    std::int64_t sum = 0;
    for (int c : h.nodes[v].children) sum += self(self, c);
    take_node[v] = ch.votes[v] >= sum;
    best[v] = take_node[v] ? ch.votes[v] : sum;
    return best[v];
  };
  solve(solve, 0);

  HFrontier f;
  auto collect = [&](auto&& self, int v) -> void {
    if (take_node[v]) {
      f.nodes.push_back(v);
      return;
    }
    for (int c : h.nodes[v].children) self(self, c);
  };
  collect(collect, 0);
  return f;
}

void KernelPlan::validate() const {
  if (batches.empty()) throw ConfigError("plan has no batches");
  std::vector<ItemId> k = kernel;
  std::sort(k.begin(), k.end());
  if (std::adjacent_find(k.begin(), k.end()) != k.end())
    throw ConfigError("duplicate kernel item");
  if (batches.size() > 1 && k.empty())
    throw ConfigError("multi-batch plans need a nonempty kernel");
  std::vector<ItemId> seen;  // non-kernel items, must be unique
  for (const auto& batch : batches) {
    std::vector<ItemId> b = batch;
    std::sort(b.begin(), b.end());
    if (!std::includes(b.begin(), b.end(), k.begin(), k.end()))
      throw ConfigError("batch does not contain the kernel");
    std::vector<ItemId> rest;
    std::set_difference(b.begin(), b.end(), k.begin(), k.end(),
                        std::back_inserter(rest));
    seen.insert(seen.end(), rest.begin(), rest.end());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ConfigError("batches overlap outside the kernel");
}

std::vector<ItemId> KernelPlan::coverage() const {
  std::vector<ItemId> all;
  for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

namespace {

std::vector<ItemId> kernel_signature(const std::vector<ItemId>& node_items,
                                     const std::vector<ItemId>& kernel) {
  std::vector<ItemId> sig;
  std::set_intersection(node_items.begin(), node_items.end(), kernel.begin(),
                        kernel.end(), std::back_inserter(sig));
  return sig;
}

std::string describe_set(const std::vector<ItemId>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size() && i < 8; ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  if (s.size() > 8) out += ",...";
  return out + "}";
}

}  // namespace

ConsensusHierarchy merge_batches(const std::vector<ConsensusHierarchy>& parts,
                                 const KernelPlan& plan) {
  plan.validate();
  if (parts.size() != plan.batches.size())
    throw ConfigError("one consensus per batch expected");

  std::vector<ItemId> kernel = plan.kernel;
  std::sort(kernel.begin(), kernel.end());
  const std::vector<ItemId> universe = plan.coverage();

  struct Merged {
    std::vector<ItemId> items;
    std::int64_t votes = 0;
  };
  std::map<std::vector<ItemId>, Merged> by_signature;
  struct Orphan {
    std::vector<ItemId> items;
    std::int64_t votes = 0;
  };
  std::vector<Orphan> orphans;

  for (std::size_t b = 0; b < parts.size(); ++b) {
    const Hierarchy& h = parts[b].tree;
    h.validate();
    std::vector<std::vector<ItemId>> sigs(h.nodes.size());
    std::map<std::vector<ItemId>, int> seen_sig;
    for (std::size_t v = 0; v < h.nodes.size(); ++v) {
      sigs[v] = kernel_signature(h.nodes[v].items, kernel);
      if (sigs[v].empty()) continue;
      const auto [it, fresh] =
          seen_sig.try_emplace(sigs[v], static_cast<int>(v));
      if (!fresh)
        throw AmbiguityError(
            "batch " + std::to_string(b) + ": clusters " +
            describe_set(h.nodes[it->second].items) + " and " +
            describe_set(h.nodes[v].items) + " share kernel signature " +
            describe_set(sigs[v]));
    }
    for (std::size_t v = 0; v < h.nodes.size(); ++v) {
      if (!sigs[v].empty()) {
        Merged& m = by_signature[sigs[v]];
        std::vector<ItemId> merged;
        std::set_union(m.items.begin(), m.items.end(),
                       h.nodes[v].items.begin(), h.nodes[v].items.end(),
                       std::back_inserter(merged));
        m.items = std::move(merged);
        m.votes += parts[b].votes.at(v);
      } else {
        orphans.push_back({h.nodes[v].items, parts[b].votes.at(v)});
      }
    }
  }

  std::map<std::vector<ItemId>, std::int64_t> votes;
  for (const auto& [sig, m] : by_signature) {
    auto& slot = votes[m.items];
    slot += m.votes;
  }
  // An orphan nests under the merged class of its nearest signed ancestor
  // automatically: that class's union contains the ancestor and hence the
  // orphan. Orphans with no signed ancestor end up under the root.
  for (const Orphan& o : orphans) votes[o.items] += o.votes;

  std::vector<std::vector<ItemId>> family;
  family.reserve(votes.size());
  for (const auto& [set, v] : votes) family.push_back(set);

  ConsensusHierarchy out;
  try {
    out.tree =
        hierarchy_from_family(std::move(family), universe, /*complete=*/true);
  } catch (const StructureError& e) {
    throw AmbiguityError(std::string("merged clusters are irreconcilable: ") +
                         e.what());
  }
  out.votes.resize(out.tree.nodes.size(), 0);
  for (std::size_t v = 0; v < out.tree.nodes.size(); ++v) {
    const auto it = votes.find(out.tree.nodes[v].items);
    if (it != votes.end()) out.votes[v] = it->second;
  }
  return out;
}

BatchOutcome cluster_batch(const std::vector<ItemId>& batch,
                           const ClusterStageConfig& cfg, RngSeed seed) {
  if (cfg.workers_per_batch < 1)
    throw ConfigError("workers_per_batch must be >= 1");
  BatchOutcome out;
  for (int w = 0; w < cfg.workers_per_batch; ++w) {
    Clustering ans = answer_clustering(cfg.worker, batch, cfg.truth,
                                       derive(seed, 0x6b, w));
    ans.worker = static_cast<WorkerId>(w);
    out.answers.push_back(std::move(ans));
  }
  const ClusteringGraph graph = build_clustering_graph(out.answers);
  out.clique = max_clique(graph);
  std::vector<Clustering> chosen;
  for (int w : out.clique) chosen.push_back(graph.workers[w]);
  std::vector<ItemId> universe = batch;
  std::sort(universe.begin(), universe.end());
  out.consensus = assemble_consensus(chosen, universe);
  return out;
}

PipelineOutcome cluster_pipeline(const KernelPlan& plan,
                                 const ClusterStageConfig& cfg, RngSeed seed) {
  plan.validate();
  PipelineOutcome out;
  std::vector<ConsensusHierarchy> parts;
  for (std::size_t b = 0; b < plan.batches.size(); ++b) {
    BatchOutcome batch =
        cluster_batch(plan.batches[b], cfg, derive(seed, 0xba7c4, b));
    out.cost.clustering_tasks +=
        static_cast<std::int64_t>(plan.batches[b].size()) *
        cfg.workers_per_batch;
    parts.push_back(std::move(batch.consensus));
  }
  out.merged = merge_batches(parts, plan);
  out.frontier = ml_frontier(out.merged);
  out.partition = frontier_clustering(out.merged.tree, out.frontier);
  return out;
}

namespace {

/// Ground-truth cluster index for a remaining item: walk up from the item's
/// leaf in the truth hierarchy until some fixed cluster overlaps, then take
/// the cluster with the largest overlap (smallest index on ties).
std::size_t true_cluster_index(const Hierarchy& truth, ItemId item,
                               const std::vector<std::vector<ItemId>>& fixed) {
  int v = -1;
  for (std::size_t u = 0; u < truth.nodes.size(); ++u)
    if (truth.is_leaf(static_cast<int>(u)) &&
        std::binary_search(truth.nodes[u].items.begin(),
                           truth.nodes[u].items.end(), item)) {
      v = static_cast<int>(u);
      break;
    }
  if (v < 0) throw DomainMismatchError("item missing from truth hierarchy");
  while (v >= 0) {
    std::size_t best = fixed.size();
    std::size_t best_overlap = 0;
    for (std::size_t c = 0; c < fixed.size(); ++c) {
      std::vector<ItemId> inter;
      std::set_intersection(fixed[c].begin(), fixed[c].end(),
                            truth.nodes[v].items.begin(),
                            truth.nodes[v].items.end(),
                            std::back_inserter(inter));
      if (inter.size() > best_overlap) {
        best_overlap = inter.size();
        best = c;
      }
    }
    if (best < fixed.size()) return best;
    v = truth.nodes[v].parent;
  }
  return 0;  // unreachable: the root overlaps every nonempty cluster
}

}  // namespace

HybridOutcome cluster_then_categorize(const std::vector<ItemId>& universe,
                                      const KernelPlan& plan,
                                      const ClusterStageConfig& cfg,
                                      const CategorizationWorkerModel& cat,
                                      int votes_per_item,
                                      std::size_t truth_dim, RngSeed seed) {
  if (votes_per_item < 1 || votes_per_item % 2 == 0)
    throw ConfigError("votes_per_item must be odd");
  if (truth_dim >= cfg.truth.size())
    throw ConfigError("truth_dim out of range");

  PipelineOutcome pipeline = cluster_pipeline(plan, cfg, seed);
  HybridOutcome out;
  out.merged = std::move(pipeline.merged);
  out.frontier = pipeline.frontier;
  out.cost = pipeline.cost;

  std::vector<std::vector<ItemId>> fixed = pipeline.partition.clusters;
  std::vector<ItemId> clustered = plan.coverage();
  std::vector<ItemId> all = universe;
  std::sort(all.begin(), all.end());
  std::vector<ItemId> remaining;
  std::set_difference(all.begin(), all.end(), clustered.begin(),
                      clustered.end(), std::back_inserter(remaining));

  const Hierarchy& truth = cfg.truth[truth_dim];
  for (ItemId item : remaining) {
    const std::size_t truth_idx = true_cluster_index(truth, item, fixed);
    std::vector<std::int64_t> tally(fixed.size(), 0);
    for (int vote = 0; vote < votes_per_item; ++vote) {
      const std::size_t ans = answer_categorize(
          cat, item, fixed, truth_idx, derive(seed, 0xca7 + item, vote));
      ++tally[ans];
      ++out.cost.categorization_tasks;
    }
    const std::size_t winner = static_cast<std::size_t>(
        std::max_element(tally.begin(), tally.end()) - tally.begin());
    out.assignment.emplace_back(item, static_cast<int>(winner));
    fixed[winner].insert(
        std::lower_bound(fixed[winner].begin(), fixed[winner].end(), item),
        item);
  }

  out.partition.clusters = std::move(fixed);
  out.partition.validate();
  return out;
}

}  // namespace crowdsim
