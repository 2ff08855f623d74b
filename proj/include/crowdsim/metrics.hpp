#pragma once

#include <cstdint>

#include "crowdsim/counting.hpp"
#include "crowdsim/hierarchy.hpp"

namespace crowdsim {

/// Pairwise (Rand-style) clustering quality over all unordered item pairs.
struct ClusterEval {
  double pair_recall = 0.0;
  double pair_precision = 0.0;
  double pair_accuracy = 0.0;
};

/// TP = pairs co-clustered in both; recall = TP / truth-same pairs
/// (1 when truth has none); precision = TP / pred-same pairs (1 when pred
/// has none); accuracy = (TP + TN) / all pairs. Recall and precision are
/// direction-sensitive; accuracy is symmetric.
ClusterEval pairwise_eval(const Clustering& pred, const Clustering& truth);

struct CountEval {
  std::int64_t abs_error = 0;
  double rel_error = 0.0;
  std::int64_t tasks = 0;
};

/// Relative error is |final - true| / max(true, 1).
CountEval count_eval(const CountRunReport& report, const SyntheticImage& image);

/// Unit-task accounting. A counting or categorization answer is one task;
/// a clustering answer over a batch of m items is m tasks, matching
/// marketplace pricing that scales with items shown.
struct CostReport {
  std::int64_t counting_tasks = 0;
  std::int64_t clustering_tasks = 0;
  std::int64_t categorization_tasks = 0;

  std::int64_t total() const {
    return counting_tasks + clustering_tasks + categorization_tasks;
  }
};

}  // namespace crowdsim
