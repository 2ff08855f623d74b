#pragma once

#include <cstdint>
#include <vector>

#include "crowdsim/rng.hpp"
#include "crowdsim/seg_tree.hpp"
#include "crowdsim/worker.hpp"

namespace crowdsim {

/// Median of worker answers; even-length input uses the lower median.
std::int64_t aggregate_median(const std::vector<std::int64_t>& answers);

/// Answer source for one counting question: `honest` workers follow the
/// error model; the last `adversarial` slots of each question answer
/// uniformly in [adv_lo, adv_hi] regardless of the truth.
struct CountingPanel {
  CountingWorkerModel honest;
  int adversarial = 0;
  std::int64_t adv_lo = 0;
  std::int64_t adv_hi = 1000;
};

struct CountQuestion {
  NodeId node = 0;
  std::vector<std::int64_t> answers;
  std::int64_t aggregate = 0;
};

/// Full trace of one drill-down counting run.
struct CountRunReport {
  std::vector<CountQuestion> questions;
  FrontierSet final_frontier;
  std::int64_t final_count = 0;
  std::int64_t total_tasks = 0;
  std::vector<NodeId> saturated;
  /// Tree as queried, including any latent expansions that materialized.
  SegTree queried_tree;
};

/// Breadth-first drill-down: ask the root; expand every node whose
/// aggregated count reaches `k` and ask all its children; nodes below `k`
/// join the final frontier. A leaf at or above `k` with nothing to expand
/// into joins the frontier flagged saturated. Deterministic given the seed.
CountRunReport frontier_count(const SegTree& tree, const SyntheticImage& image,
                              const CountingPanel& panel, std::int64_t k,
                              int answers_per_question, RngSeed seed);

struct FrontierOracle {
  FrontierSet frontier;
  std::vector<NodeId> saturated;
  SegTree queried_tree;
};

/// Offline comparator: the shallowest frontier in which every node's
/// ground-truth count is below `k`, with saturated leaves flagged.
FrontierOracle minimal_frontier_oracle(const SegTree& tree,
                                       const SyntheticImage& image,
                                       std::int64_t k);

/// Nodes asked by a noiseless run: the oracle frontier plus all ancestors.
std::vector<NodeId> ancestor_closure(const SegTree& tree,
                                     const FrontierSet& frontier);

}  // namespace crowdsim
