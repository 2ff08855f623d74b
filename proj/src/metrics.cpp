#include "crowdsim/metrics.hpp"

#include <cstdlib>
#include <unordered_map>

#include "crowdsim/errors.hpp"

namespace crowdsim {

ClusterEval pairwise_eval(const Clustering& pred, const Clustering& truth) {
  const auto universe = truth.universe();
  if (pred.universe() != universe)
    throw DomainMismatchError("prediction and truth cover different items");

  std::unordered_map<ItemId, int> p_idx, t_idx;
  for (std::size_t c = 0; c < pred.clusters.size(); ++c)
    for (ItemId i : pred.clusters[c]) p_idx[i] = static_cast<int>(c);
  for (std::size_t c = 0; c < truth.clusters.size(); ++c)
    for (ItemId i : truth.clusters[c]) t_idx[i] = static_cast<int>(c);

  const std::size_t n = universe.size();
  std::int64_t tp = 0, truth_same = 0, pred_same = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      const bool same_t = t_idx[universe[a]] == t_idx[universe[b]];
      const bool same_p = p_idx[universe[a]] == p_idx[universe[b]];
      truth_same += same_t;
      pred_same += same_p;
      tp += same_t && same_p;
    }
  const std::int64_t all = static_cast<std::int64_t>(n) *
                           static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t tn = all - truth_same - pred_same + tp;

  ClusterEval e;
  e.pair_recall = truth_same == 0 ? 1.0 : double(tp) / double(truth_same);
  e.pair_precision = pred_same == 0 ? 1.0 : double(tp) / double(pred_same);
  e.pair_accuracy = all == 0 ? 1.0 : double(tp + tn) / double(all);
  return e;
}

CountEval count_eval(const CountRunReport& report,
                     const SyntheticImage& image) {
  CountEval e;
  const std::int64_t truth = image.total_objects();
  e.abs_error = std::llabs(report.final_count - truth);
  e.rel_error =
      double(e.abs_error) / double(std::max<std::int64_t>(truth, 1));
  e.tasks = report.total_tasks;
  return e;
}

}  // namespace crowdsim
