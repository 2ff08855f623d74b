#pragma once

#include <cstdint>
#include <vector>

#include "crowdsim/hierarchy.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {

/// Counting error model: exact below the onset threshold k, superlinearly
/// noisy above it. Answers a count of true_c objects with
///   true_c                                        if true_c < k (whp),
///   max(0, true_c + round(s * epsilon * (true_c - k + 1)^alpha))  otherwise,
/// where s is a random sign. p_small_err optionally injects off-by-one
/// errors below the threshold.
struct CountingWorkerModel {
  std::int64_t k = 20;
  double epsilon = 0.3;
  double alpha = 1.5;
  double p_small_err = 0.0;

  void validate() const;
};

std::int64_t answer_count(const CountingWorkerModel& model,
                          std::int64_t true_c, RngSeed seed);

/// Clustering behaviour: pick a perspective (a ground-truth hierarchy) by
/// multinomial weights, pick a granularity by top-down expansion, then
/// misplace items independently. The root is always expanded, so the
/// coarsest reachable granularity is the depth-one frontier; p_expand
/// controls descent below that.
struct ClusteringWorkerModel {
  std::vector<double> perspective_weights;
  double p_expand = 0.5;
  double e_item = 0.0;

  void validate() const;
};

Clustering answer_clustering(const ClusteringWorkerModel& model,
                             const std::vector<ItemId>& items,
                             const std::vector<Hierarchy>& truth,
                             RngSeed seed);

/// Categorization error model: the true cluster with probability 1 - e_cat,
/// otherwise a uniformly random wrong cluster.
struct CategorizationWorkerModel {
  double e_cat = 0.0;

  void validate() const;
};

std::size_t answer_categorize(const CategorizationWorkerModel& model,
                              ItemId item,
                              const std::vector<std::vector<ItemId>>& clusters,
                              std::size_t truth_assignment, RngSeed seed);

}  // namespace crowdsim
