#include <doctest.h>

#include <cmath>

#include "crowdsim/errors.hpp"
#include "crowdsim/worker.hpp"
#include "helpers.hpp"

using namespace crowdsim;
using test_helpers::make_shape_color_universe;

TEST_CASE("counting is exact below the error onset") {
  CountingWorkerModel m;  // k=20, p_small_err=0
  CHECK(answer_count(m, 10, RngSeed{1}) == 10);
  m.epsilon = 0.5;
  CHECK(answer_count(m, 19, RngSeed{123}) == 19);
  for (std::int64_t c = 0; c < m.k; ++c)
    for (std::uint64_t s = 0; s < 50; ++s)
      CHECK(answer_count(m, c, RngSeed{s}) == c);
}

TEST_CASE("above-onset noise follows the superlinear formula") {
  CountingWorkerModel m;
  m.k = 20;
  m.epsilon = 0.3;
  m.alpha = 1.5;
  // Hand-derived magnitude: round(0.3 * (50-20+1)^1.5) = round(51.78) = 52.
  const std::int64_t mag = std::llround(0.3 * std::pow(31.0, 1.5));
  REQUIRE(mag == 52);
  const std::int64_t got = answer_count(m, 50, RngSeed{3});
  CHECK(got != 50);
  const bool plus = got == 50 + mag;
  const bool minus = got == std::max<std::int64_t>(0, 50 - mag);
  CHECK((plus || minus));

  // Both signs occur across seeds and nothing else does.
  bool saw_plus = false, saw_minus = false;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::int64_t a = answer_count(m, 50, RngSeed{s});
    if (a == 50 + mag) saw_plus = true;
    if (a == std::max<std::int64_t>(0, 50 - mag)) saw_minus = true;
    CHECK((a == 50 + mag || a == std::max<std::int64_t>(0, 50 - mag)));
  }
  CHECK(saw_plus);
  CHECK(saw_minus);
}

TEST_CASE("small errors below the onset are off by one") {
  CountingWorkerModel m;
  m.p_small_err = 1.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::int64_t a = answer_count(m, 5, RngSeed{s});
    CHECK((a == 4 || a == 6));
    CHECK(answer_count(m, 0, RngSeed{s}) == 1);
  }
}

TEST_CASE("clustering worker at the granularity extremes") {
  const auto u = make_shape_color_universe();
  std::vector<ItemId> ids;
  for (const Item& it : u.items) ids.push_back(it.id);

  ClusteringWorkerModel m;
  m.perspective_weights = {1.0, 0.0};  // always shape

  SUBCASE("p_expand=0 gives the coarsest (depth-one) frontier") {
    m.p_expand = 0.0;
    const Clustering got = answer_clustering(m, ids, u.truth, RngSeed{5});
    const Clustering want =
        frontier_clustering(u.truth[0], depth_frontier(u.truth[0], 1));
    CHECK(got.clusters == want.clusters);
    CHECK(got.clusters.size() == 3);
  }
  SUBCASE("p_expand=1 gives the leaf frontier") {
    m.p_expand = 1.0;
    const Clustering got = answer_clustering(m, ids, u.truth, RngSeed{5});
    const Clustering want =
        frontier_clustering(u.truth[0], leaf_frontier(u.truth[0]));
    CHECK(got.clusters == want.clusters);
    CHECK(got.clusters.size() == 6);
  }
  SUBCASE("empty item set clusters to nothing") {
    const Clustering got = answer_clustering(m, {}, u.truth, RngSeed{5});
    CHECK(got.clusters.empty());
  }
}

TEST_CASE("clustering output is always a partition") {
  Rng meta(RngSeed{31});
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 4 + meta.pick(20);
    const Hierarchy h = test_helpers::random_hierarchy(n, meta);
    std::vector<ItemId> ids = h.universe();
    ClusteringWorkerModel m;
    m.perspective_weights = {1.0};
    m.p_expand = meta.uniform();
    m.e_item = meta.uniform() * 0.5;
    const Clustering c =
        answer_clustering(m, ids, {h}, RngSeed{9000 + std::uint64_t(rep)});
    c.validate();
    CHECK(c.universe() == ids);
  }
}

TEST_CASE("error-free clusterings are consistent with their source") {
  Rng meta(RngSeed{77});
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 4 + meta.pick(8);
    const Hierarchy h = test_helpers::random_hierarchy(n, meta, 0.7, 2);
    std::vector<ItemId> ids = h.universe();
    ClusteringWorkerModel m;
    m.perspective_weights = {1.0};
    m.p_expand = meta.uniform();
    const Clustering c =
        answer_clustering(m, ids, {h}, RngSeed{500 + std::uint64_t(rep)});
    for (const HFrontier& f : enumerate_frontiers(h))
      CHECK(is_consistent(c, frontier_clustering(h, f)));
  }
}

TEST_CASE("perspective mixture draws from exactly one hierarchy") {
  const auto u = make_shape_color_universe();
  std::vector<ItemId> ids;
  for (const Item& it : u.items) ids.push_back(it.id);
  ClusteringWorkerModel m;
  m.perspective_weights = {0.6, 0.4};
  m.p_expand = 0.5;

  auto consistent_with_all_frontiers = [](const Clustering& c,
                                          const Hierarchy& h) {
    for (const HFrontier& f : enumerate_frontiers(h))
      if (!is_consistent(c, frontier_clustering(h, f))) return false;
    return true;
  };

  int shape_like = 0, color_like = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Clustering c = answer_clustering(m, ids, u.truth, RngSeed{s});
    const bool shape_ok = consistent_with_all_frontiers(c, u.truth[0]);
    const bool color_ok = consistent_with_all_frontiers(c, u.truth[1]);
    CHECK(shape_ok != color_ok);  // crossing hierarchies: exactly one
    shape_like += shape_ok;
    color_like += color_ok;
  }
  CHECK(shape_like > color_like);  // 0.6 vs 0.4 over 40 draws
  CHECK(color_like > 0);
}

TEST_CASE("categorization error model") {
  const std::vector<std::vector<ItemId>> five{{0}, {1}, {2}, {3}, {4}};
  SUBCASE("noiseless returns the truth") {
    CategorizationWorkerModel m;
    for (std::uint64_t s = 0; s < 20; ++s)
      CHECK(answer_categorize(m, 7, five, 2, RngSeed{s}) == 2);
  }
  SUBCASE("certain error with two clusters is the complement") {
    CategorizationWorkerModel m;
    m.e_cat = 1.0;
    const std::vector<std::vector<ItemId>> two{{0}, {1}};
    for (std::uint64_t s = 0; s < 20; ++s)
      CHECK(answer_categorize(m, 7, two, 0, RngSeed{s}) == 1);
  }
  SUBCASE("monte carlo rate matches e_cat") {
    CategorizationWorkerModel m;
    m.e_cat = 0.2;
    int correct = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s)
      if (answer_categorize(m, 7, five, 1, RngSeed{std::uint64_t(s)}) == 1)
        ++correct;
    const double rate = double(correct) / trials;
    CHECK(rate == doctest::Approx(0.8).epsilon(0.025));
  }
}

TEST_CASE("model validation rejects bad parameters") {
  CountingWorkerModel cm;
  cm.k = 0;
  CHECK_THROWS_AS(answer_count(cm, 5, RngSeed{1}), ConfigError);
  ClusteringWorkerModel m;
  m.perspective_weights = {0.5, 0.4};
  CHECK_THROWS_AS(answer_clustering(m, {0}, {}, RngSeed{1}), ConfigError);
  CategorizationWorkerModel cat;
  cat.e_cat = 1.5;
  CHECK_THROWS_AS(answer_categorize(cat, 0, {{0}}, 0, RngSeed{1}),
                  ConfigError);
}
