#include <doctest.h>

#include <map>
#include <set>

#include "crowdsim/errors.hpp"
#include "crowdsim/metrics.hpp"
#include "helpers.hpp"

using namespace crowdsim;

namespace {

/// Independent recount: set-based, no index maps.
ClusterEval slow_pairwise_eval(const Clustering& pred,
                               const Clustering& truth) {
  auto same = [](const Clustering& c, ItemId a, ItemId b) {
    for (const auto& cl : c.clusters) {
      const bool ha = std::find(cl.begin(), cl.end(), a) != cl.end();
      const bool hb = std::find(cl.begin(), cl.end(), b) != cl.end();
      if (ha && hb) return true;
      if (ha || hb) return false;
    }
    return false;
  };
  const auto universe = truth.universe();
  double tp = 0, fn = 0, fp = 0, tn = 0;
  for (std::size_t i = 0; i < universe.size(); ++i)
    for (std::size_t j = i + 1; j < universe.size(); ++j) {
      const bool t = same(truth, universe[i], universe[j]);
      const bool p = same(pred, universe[i], universe[j]);
      tp += t && p;
      fn += t && !p;
      fp += !t && p;
      tn += !t && !p;
    }
  ClusterEval e;
  e.pair_recall = tp + fn == 0 ? 1.0 : tp / (tp + fn);
  e.pair_precision = tp + fp == 0 ? 1.0 : tp / (tp + fp);
  e.pair_accuracy = (tp + tn) / std::max(1.0, tp + tn + fp + fn);
  return e;
}

}  // namespace

TEST_CASE("pairwise eval fixed cases") {
  const Clustering truth{0, {{0, 1, 2}}};
  SUBCASE("identical partitions score one") {
    const ClusterEval e = pairwise_eval(truth, truth);
    CHECK(e.pair_recall == 1.0);
    CHECK(e.pair_precision == 1.0);
    CHECK(e.pair_accuracy == 1.0);
  }
  SUBCASE("all-singleton prediction misses every pair") {
    const Clustering pred{1, {{0}, {1}, {2}}};
    const ClusterEval e = pairwise_eval(pred, truth);
    CHECK(e.pair_recall == 0.0);
    CHECK(e.pair_accuracy == 0.0);  // all three pairs wrong
    CHECK(e.pair_precision == 1.0);  // no predicted pairs
  }
  SUBCASE("all-singleton truth defines recall as one") {
    const Clustering singletons{0, {{0}, {1}, {2}}};
    const Clustering pred{1, {{0, 1}, {2}}};
    const ClusterEval e = pairwise_eval(pred, singletons);
    CHECK(e.pair_recall == 1.0);
    CHECK(e.pair_precision == 0.0);
  }
  SUBCASE("universe mismatch") {
    const Clustering other{1, {{0, 1, 3}}};
    CHECK_THROWS_AS(pairwise_eval(other, truth), DomainMismatchError);
  }
}

TEST_CASE("pairwise eval matches an independent recount") {
  Rng meta(RngSeed{61});
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + meta.pick(20);
    const Clustering pred = test_helpers::random_clustering(n, meta);
    const Clustering truth = test_helpers::random_clustering(n, meta);
    const ClusterEval fast = pairwise_eval(pred, truth);
    const ClusterEval slow = slow_pairwise_eval(pred, truth);
    CHECK(fast.pair_recall == doctest::Approx(slow.pair_recall));
    CHECK(fast.pair_precision == doctest::Approx(slow.pair_precision));
    CHECK(fast.pair_accuracy == doctest::Approx(slow.pair_accuracy));
  }
}

TEST_CASE("recall and precision swap under argument exchange") {
  Rng meta(RngSeed{62});
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + meta.pick(15);
    const Clustering a = test_helpers::random_clustering(n, meta);
    const Clustering b = test_helpers::random_clustering(n, meta);
    const ClusterEval ab = pairwise_eval(a, b);
    const ClusterEval ba = pairwise_eval(b, a);
    CHECK(ab.pair_recall == doctest::Approx(ba.pair_precision));
    CHECK(ab.pair_precision == doctest::Approx(ba.pair_recall));
    CHECK(ab.pair_accuracy == doctest::Approx(ba.pair_accuracy));
  }
}

TEST_CASE("count eval arithmetic") {
  SyntheticImage img{100, 100, {}};
  test_helpers::sprinkle_objects(img, img.bounds(), 100);
  CountRunReport r;
  r.final_count = 100;
  r.total_tasks = 18;
  CHECK(count_eval(r, img).rel_error == 0.0);
  CHECK(count_eval(r, img).abs_error == 0);
  r.final_count = 93;
  const CountEval e = count_eval(r, img);
  CHECK(e.abs_error == 7);
  CHECK(e.rel_error == doctest::Approx(0.07));
  CHECK(e.tasks == 18);
}

TEST_CASE("mean relative error matches recomputation over a batch") {
  SyntheticImage img{100, 100, {}};
  test_helpers::sprinkle_objects(img, img.bounds(), 50);
  std::vector<CountRunReport> reports(5);
  const std::int64_t finals[5] = {50, 45, 55, 50, 40};
  double mean = 0;
  for (int i = 0; i < 5; ++i) {
    reports[i].final_count = finals[i];
    mean += count_eval(reports[i], img).rel_error;
  }
  mean /= 5;
  double oracle = 0;
  for (const std::int64_t f : finals)
    oracle += std::abs(double(f) - 50.0) / 50.0;
  oracle /= 5;
  CHECK(mean == doctest::Approx(oracle));
}

TEST_CASE("cost report totals are the sum of their parts") {
  CostReport c;
  c.counting_tasks = 12;
  c.clustering_tasks = 200;
  c.categorization_tasks = 480;
  CHECK(c.total() == 692);
}
