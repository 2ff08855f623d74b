#include "crowdsim/worker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdsim/errors.hpp"

namespace crowdsim {

void CountingWorkerModel::validate() const {
  if (k < 1) throw ConfigError("counting threshold k must be >= 1");
  if (alpha < 1.0) throw ConfigError("alpha must be >= 1");
  if (epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  if (p_small_err < 0.0 || p_small_err > 1.0)
    throw ConfigError("p_small_err must lie in [0, 1]");
}

std::int64_t answer_count(const CountingWorkerModel& model,
                          std::int64_t true_c, RngSeed seed) {
  model.validate();
  Rng rng(seed);
  if (true_c < model.k) {
    if (model.p_small_err > 0.0 && rng.bernoulli(model.p_small_err)) {
      if (true_c == 0) return 1;
      return true_c + rng.sign();
    }
    return true_c;
  }
  const double magnitude =
      model.epsilon *
      std::pow(static_cast<double>(true_c - model.k + 1), model.alpha);
  const std::int64_t noise = rng.sign() * std::llround(magnitude);
  return std::max<std::int64_t>(0, true_c + noise);
}

void ClusteringWorkerModel::validate() const {
  if (perspective_weights.empty())
    throw ConfigError("perspective_weights is empty");
  double sum = 0.0;
  for (double w : perspective_weights) {
    if (w < 0.0) throw ConfigError("negative perspective weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("perspective_weights must sum to 1");
  if (p_expand < 0.0 || p_expand > 1.0)
    throw ConfigError("p_expand must lie in [0, 1]");
  if (e_item < 0.0 || e_item > 1.0)
    throw ConfigError("e_item must lie in [0, 1]");
}

namespace {

std::size_t sample_index(const std::vector<double>& weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

/// Top-down granularity sample: the root always expands; every deeper
/// non-leaf node expands independently with probability p_expand.
void sample_frontier(const Hierarchy& h, double p_expand, Rng& rng, int v,
                     bool is_root, std::vector<int>& out) {
  const bool expand =
      !h.is_leaf(v) && (is_root || rng.bernoulli(p_expand));
  if (!expand) {
    out.push_back(v);
    return;
  }
  for (int c : h.nodes[v].children)
    sample_frontier(h, p_expand, rng, c, false, out);
}

}  // namespace

Clustering answer_clustering(const ClusteringWorkerModel& model,
                             const std::vector<ItemId>& items,
                             const std::vector<Hierarchy>& truth,
                             RngSeed seed) {
  model.validate();
  if (truth.size() != model.perspective_weights.size())
    throw ConfigError("one perspective weight per ground-truth hierarchy");
  std::vector<ItemId> wanted = items;
  std::sort(wanted.begin(), wanted.end());
  for (const Hierarchy& h : truth) {
    const auto& root = h.universe();
    if (!std::includes(root.begin(), root.end(), wanted.begin(), wanted.end()))
      throw DomainMismatchError("item missing from a ground-truth hierarchy");
  }
  Clustering out;
  if (wanted.empty()) return out;

  Rng rng(seed);
  const Hierarchy& h = truth[sample_index(model.perspective_weights, rng)];
  std::vector<int> frontier;
  sample_frontier(h, model.p_expand, rng, 0, true, frontier);

  for (int v : frontier) {
    std::vector<ItemId> cluster;
    std::set_intersection(h.nodes[v].items.begin(), h.nodes[v].items.end(),
                          wanted.begin(), wanted.end(),
                          std::back_inserter(cluster));
    if (!cluster.empty()) out.clusters.push_back(std::move(cluster));
  }

  // Per-item misplacement into an existing other cluster.
  if (model.e_item > 0.0 && out.clusters.size() > 1) {
    for (ItemId item : wanted) {
      if (!rng.bernoulli(model.e_item)) continue;
      std::size_t from = 0;
      for (std::size_t c = 0; c < out.clusters.size(); ++c)
        if (std::binary_search(out.clusters[c].begin(), out.clusters[c].end(),
                               item)) {
          from = c;
          break;
        }
      std::size_t to = rng.pick(out.clusters.size() - 1);
      if (to >= from) ++to;
      auto& src = out.clusters[from];
      src.erase(std::lower_bound(src.begin(), src.end(), item));
      auto& dst = out.clusters[to];
      dst.insert(std::lower_bound(dst.begin(), dst.end(), item), item);
    }
    std::erase_if(out.clusters,
                  [](const std::vector<ItemId>& c) { return c.empty(); });
  }
  out.validate();
  return out;
}

void CategorizationWorkerModel::validate() const {
  if (e_cat < 0.0 || e_cat > 1.0)
    throw ConfigError("e_cat must lie in [0, 1]");
}

std::size_t answer_categorize(const CategorizationWorkerModel& model,
                              ItemId item,
                              const std::vector<std::vector<ItemId>>& clusters,
                              std::size_t truth_assignment, RngSeed seed) {
  model.validate();
  (void)item;
  if (clusters.empty()) throw ConfigError("no clusters to categorize into");
  if (truth_assignment >= clusters.size())
    throw BoundsError("truth assignment out of range");
  Rng rng(seed);
  if (clusters.size() == 1 || !rng.bernoulli(model.e_cat))
    return truth_assignment;
  std::size_t wrong = rng.pick(clusters.size() - 1);
  if (wrong >= truth_assignment) ++wrong;
  return wrong;
}

}  // namespace crowdsim
