#pragma once

#include <cstdint>
#include <vector>

#include "crowdsim/hierarchy.hpp"
#include "crowdsim/metrics.hpp"
#include "crowdsim/rng.hpp"
#include "crowdsim/worker.hpp"

namespace crowdsim {

/// One node per worker; an edge joins every consistent pair.
struct ClusteringGraph {
  std::vector<Clustering> workers;
  std::vector<std::pair<int, int>> edges;  // i < j
};

ClusteringGraph build_clustering_graph(std::vector<Clustering> workers);

/// Exact maximum clique by branch and bound with pivoting. Among maximum
/// cliques the lexicographically smallest index set wins. Runs on the
/// worker-consistency graph, whose handful of nodes keeps this tractable.
std::vector<int> max_clique(int n, const std::vector<std::pair<int, int>>& edges);
std::vector<int> max_clique(const ClusteringGraph& g);

/// A hierarchy with per-node support: votes(v) counts the clique workers
/// whose clustering contains exactly that node's item set.
struct ConsensusHierarchy {
  Hierarchy tree;
  std::vector<std::int64_t> votes;
};

/// Union of all clusters across pairwise-consistent workers, arranged into
/// the unique laminar tree under the universe root; missing singletons are
/// appended as unvoted leaves so children always partition their parent.
ConsensusHierarchy assemble_consensus(const std::vector<Clustering>& workers,
                                      const std::vector<ItemId>& universe);

/// Total votes across a frontier's nodes.
std::int64_t frontier_votes(const ConsensusHierarchy& ch, const HFrontier& f);

/// Frontier maximizing summed votes by tree DP
/// best(v) = max(votes(v), sum best(child)), ties toward the shallower node.
HFrontier ml_frontier(const ConsensusHierarchy& ch);

/// Shared kernel plus per-batch item sets; batches overlap only in the
/// kernel and jointly cover the clustered items.
struct KernelPlan {
  std::vector<ItemId> kernel;
  std::vector<std::vector<ItemId>> batches;

  void validate() const;
  std::vector<ItemId> coverage() const;
};

/// Merges per-batch consensus hierarchies into one over the union of
/// batches. Nodes are identified across batches by equal nonempty kernel
/// signature (node items ∩ kernel) and merged by union; a repeated nonempty
/// signature inside one batch, or a non-laminar merged family, raises
/// AmbiguityError. Signature-less nodes attach beneath the smallest merged
/// node containing their batch parent's signature, else beneath the root.
ConsensusHierarchy merge_batches(const std::vector<ConsensusHierarchy>& parts,
                                 const KernelPlan& plan);

/// Simulated clustering stage shared by the batch pipelines: W workers
/// answer per batch, the consistency graph's maximum clique is kept, and
/// its clusterings are assembled into the batch consensus.
struct ClusterStageConfig {
  int workers_per_batch = 7;
  ClusteringWorkerModel worker;
  std::vector<Hierarchy> truth;
};

struct BatchOutcome {
  ConsensusHierarchy consensus;
  std::vector<Clustering> answers;
  std::vector<int> clique;
};

BatchOutcome cluster_batch(const std::vector<ItemId>& batch,
                           const ClusterStageConfig& cfg, RngSeed seed);

/// Batch clustering + merge over a whole plan.
struct PipelineOutcome {
  ConsensusHierarchy merged;
  HFrontier frontier;
  Clustering partition;  // frontier clusters of the merged hierarchy
  CostReport cost;
};

PipelineOutcome cluster_pipeline(const KernelPlan& plan,
                                 const ClusterStageConfig& cfg, RngSeed seed);

/// Hybrid pipeline: cluster the plan's items, fix the maximum-likelihood
/// frontier, then place every remaining universe item into those fixed
/// clusters by majority over `votes_per_item` categorization answers.
/// `truth_dim` selects the ground-truth hierarchy used to derive each
/// item's true cluster.
struct HybridOutcome {
  ConsensusHierarchy merged;
  HFrontier frontier;
  Clustering partition;  // over the full universe
  std::vector<std::pair<ItemId, int>> assignment;
  CostReport cost;
};

HybridOutcome cluster_then_categorize(const std::vector<ItemId>& universe,
                                      const KernelPlan& plan,
                                      const ClusterStageConfig& cfg,
                                      const CategorizationWorkerModel& cat,
                                      int votes_per_item, std::size_t truth_dim,
                                      RngSeed seed);

}  // namespace crowdsim
