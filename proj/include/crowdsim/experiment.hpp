#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crowdsim/consensus.hpp"
#include "crowdsim/json_io.hpp"
#include "crowdsim/prior.hpp"

namespace crowdsim {

enum class ExperimentKind {
  count,
  count_prior,
  cluster,
  cluster_merge,
  cluster_categorize,
};

/// Explicit worker description for fixture configs: a perspective plus a
/// fixed granularity (frontier depth or explicit frontier nodes).
struct ExplicitWorker {
  std::size_t hierarchy = 0;
  std::optional<int> depth;          // depth_frontier when set
  std::vector<int> frontier_nodes;   // explicit frontier when nonempty
};

struct CountAlgoConfig {
  std::int64_t k = 20;
  int answers_per_question = 3;
  std::int64_t leaf_area = 64;
  int fanout = 2;
  int adversarial_answers = 0;
  std::int64_t adv_lo = 0;
  std::int64_t adv_hi = 1000;
  // count_prior only
  int grid = 8;
  double prior_noise = 0.2;
  GroupingStrategy grouping = GroupingStrategy::contiguous_greedy;
};

struct ClusterAlgoConfig {
  int workers_per_batch = 7;
  std::size_t batch_size = 40;
  int kernel_per_class = 2;
  int votes_per_item = 3;
  std::size_t clustered_items = 40;   // cluster_categorize only
  std::size_t reference_dimension = 0;
  std::vector<ExplicitWorker> explicit_workers;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::count;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  ImageGenSpec image;
  ItemUniverseSpec items;
  CountingWorkerModel count_worker;
  ClusteringWorkerModel cluster_worker;
  CategorizationWorkerModel cat_worker;
  CountAlgoConfig count_algo;
  ClusterAlgoConfig cluster_algo;
};

/// Parses and fully validates a config object; unknown keys are rejected
/// and every referenced parameter is checked before any run starts.
ExperimentConfig parse_config(const Json& j);

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  Json report;                        // per-seed JSON payload
  std::vector<std::pair<std::string, double>> row;  // CSV fields, in order
};

struct RunSummary {
  std::vector<SeedResult> results;
  Json summary;
  int failures = 0;
};

/// Executes one seed in isolation; never throws, failures are recorded.
SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs every seed (optionally on `parallel` threads), writes per-seed JSON
/// reports, a CSV of rows, and an aggregate summary into `cfg.out_dir`.
RunSummary run(const ExperimentConfig& cfg, int parallel = 1);

/// Recomputes the aggregate summary from the per-seed JSON files in `dir`;
/// holds no state beyond what is on disk.
Json summarize_directory(const std::string& dir);

/// Frontier a granularity-sampling worker population supports in
/// expectation: node weight = probability the node lands in a sampled
/// frontier (root always expands), maximized by the same DP as ml_frontier.
HFrontier expected_ml_frontier(const Hierarchy& h, double p_expand);

/// Kernel plan over the reference hierarchy: `kernel_per_class` items from
/// each depth-one class form the kernel; remaining items are packed into
/// batches of at most `batch_size`, keeping leaf clusters whole when they
/// fit. Restricting to `subset` (when nonempty) plans only those items.
KernelPlan make_plan(const Hierarchy& reference, int kernel_per_class,
                     std::size_t batch_size,
                     const std::vector<ItemId>& subset = {});

/// Stratified subset of `n` items cycling over the reference hierarchy's
/// leaves, so every leaf cluster is represented as evenly as possible.
std::vector<ItemId> stratified_subset(const Hierarchy& reference,
                                      std::size_t n);

}  // namespace crowdsim
