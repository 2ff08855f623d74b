#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crowdsim/errors.hpp"
#include "crowdsim/experiment.hpp"
#include "helpers.hpp"

using namespace crowdsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "crowdsim_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Json fig_cluster_config() {
  return Json::parse(R"({
    "kind": "cluster",
    "seeds": [1],
    "items": {
      "count": 18,
      "dimensions": [
        {"name": "shape",
         "values": ["square","rectangle","scalene","equilateral","circle","ellipse"],
         "groups": [[0,1],[2,3],[4,5]]},
        {"name": "color", "values": ["red","green","blue"], "groups": []}
      ]
    },
    "worker": {"perspective_weights": [0.5, 0.5], "p_expand": 0.5, "e_item": 0},
    "algo": {
      "reference_dimension": 0,
      "explicit_workers": [
        {"hierarchy": 1, "depth": 1},
        {"hierarchy": 1, "depth": 1},
        {"hierarchy": 0, "depth": 2},
        {"hierarchy": 0, "frontier_nodes": [1, 5, 6, 7]},
        {"hierarchy": 0, "depth": 1}
      ]
    }
  })");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CROWDSIM_CLI_PATH) + " " + args +
                          " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config validation rejects unknown keys and bad values") {
  Json good = Json::parse(
      R"({"kind":"count","seeds":[1,2],"image":{"count":50}})");
  CHECK(parse_config(good).seeds.size() == 2);

  Json top = good;
  top["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(top), ConfigError);

  Json worker = good;
  worker["worker"] = Json{{"epsilonn", 0.1}};
  CHECK_THROWS_AS(parse_config(worker), ConfigError);

  Json algo = good;
  algo["algo"] = Json{{"k", 20}, {"answerz", 3}};
  CHECK_THROWS_AS(parse_config(algo), ConfigError);

  Json noseeds = Json::parse(R"({"kind":"count","image":{"count":5}})");
  CHECK_THROWS_AS(parse_config(noseeds), ConfigError);

  Json badkind = good;
  badkind["kind"] = "countt";
  CHECK_THROWS_AS(parse_config(badkind), ConfigError);

  Json badvotes = fig_cluster_config();
  badvotes["algo"]["votes_per_item"] = 2;
  CHECK_THROWS_AS(parse_config(badvotes), ConfigError);
}

TEST_CASE("noiseless count experiment reports zero error") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::count;
  cfg.seeds = {1};
  cfg.image.count = 80;
  cfg.count_worker.epsilon = 0.0;
  const SeedResult r = run_seed(cfg, 1);
  REQUIRE_FALSE(r.failed);
  double rel = -1, final_count = -1, truth = -2;
  for (const auto& [name, value] : r.row) {
    if (name == "rel_error") rel = value;
    if (name == "final_count") final_count = value;
    if (name == "true_count") truth = value;
  }
  CHECK(rel == 0.0);
  CHECK(final_count == truth);
}

TEST_CASE("count and count_prior run from parsed configs") {
  // Zero-error workers isolate the structural effect of the prior tree.
  const Json base = Json::parse(R"({
    "kind": "count",
    "seeds": [3, 4],
    "image": {"count": 200},
    "worker": {"k": 20, "epsilon": 0.0, "alpha": 1.5},
    "algo": {"k": 20, "answers_per_question": 3, "leaf_area": 64}
  })");
  const RunSummary naive = run(parse_config(base), 1);
  CHECK(naive.failures == 0);

  Json prior = base;
  prior["kind"] = "count_prior";
  prior["algo"]["grid"] = 8;
  prior["algo"]["prior_noise"] = 0.2;
  const RunSummary planned = run(parse_config(prior), 1);
  CHECK(planned.failures == 0);

  const double naive_tasks =
      naive.summary["metrics"]["total_tasks"]["mean"].get<double>();
  const double planned_tasks =
      planned.summary["metrics"]["total_tasks"]["mean"].get<double>();
  CHECK(planned_tasks < naive_tasks);
}

TEST_CASE("cluster experiment reproduces the worked consistency graph") {
  const ExperimentConfig cfg = parse_config(fig_cluster_config());
  const SeedResult r = run_seed(cfg, 1);
  REQUIRE_FALSE(r.failed);
  const Json want_edges = Json::parse("[[0,1],[2,3],[2,4],[3,4]]");
  CHECK(r.report["edges"] == want_edges);
  CHECK(r.report["clique"] == Json::parse("[2,3,4]"));
}

TEST_CASE("runs are replayable byte for byte") {
  const fs::path dir_a = scratch_dir("replay_a");
  const fs::path dir_b = scratch_dir("replay_b");
  Json j = Json::parse(R"({
    "kind": "count",
    "seeds": [5, 6, 7],
    "image": {"count": 120},
    "worker": {"epsilon": 0.3},
    "algo": {"k": 20}
  })");
  ExperimentConfig cfg = parse_config(j);
  cfg.out_dir = dir_a.string();
  run(cfg, 1);
  cfg.out_dir = dir_b.string();
  run(cfg, 3);  // parallel execution must not change any output
  for (const char* name :
       {"seed_5.json", "seed_6.json", "seed_7.json", "rows.csv",
        "summary.json", "summary.csv"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }
}

TEST_CASE("per-seed failures are recorded without aborting the sweep") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::count;
  cfg.seeds = {1, 2};
  cfg.image.count = 4000;  // cannot pack
  cfg.image.width = 200;
  cfg.image.height = 200;
  cfg.image.attempts_per_object = 5;
  cfg.out_dir = scratch_dir("failures").string();
  const RunSummary s = run(cfg, 1);
  CHECK(s.failures == 2);
  CHECK(s.summary["failed"] == 2);
  const Json seed1 = load_json(cfg.out_dir + "/seed_1.json");
  CHECK(seed1.contains("error"));
}

TEST_CASE("directory summaries are derived from raw reports only") {
  const fs::path dir = scratch_dir("report");
  SUBCASE("empty directory gives an empty summary") {
    const Json s = summarize_directory(dir.string());
    CHECK(s["runs"] == 0);
  }
  SUBCASE("summaries match the run summary") {
    Json j = Json::parse(R"({
      "kind": "count",
      "seeds": [9, 10],
      "image": {"count": 60},
      "algo": {"k": 20}
    })");
    ExperimentConfig cfg = parse_config(j);
    cfg.out_dir = dir.string();
    const RunSummary s = run(cfg, 1);
    const Json again = summarize_directory(dir.string());
    CHECK(again["metrics"]["rel_error"]["mean"] ==
          s.summary["metrics"]["rel_error"]["mean"]);
    CHECK(again["runs"] == 2);
  }
}

TEST_CASE("expected ml frontier favors the supported level") {
  const auto u = test_helpers::make_shape_color_universe();
  // Low expansion: depth-one nodes dominate.
  const HFrontier coarse = expected_ml_frontier(u.truth[0], 0.1);
  CHECK(coarse.nodes == depth_frontier(u.truth[0], 1).nodes);
  // Certain expansion: every path reaches the leaves.
  const HFrontier fine = expected_ml_frontier(u.truth[0], 1.0);
  CHECK(fine.nodes == leaf_frontier(u.truth[0]).nodes);
}

TEST_CASE("plans respect batch capacity and kernel containment") {
  Rng meta(RngSeed{91});
  for (int rep = 0; rep < 40; ++rep) {
    const Hierarchy h =
        test_helpers::random_hierarchy(12 + meta.pick(30), meta, 0.8, 3);
    const std::size_t batch = 8 + meta.pick(10);
    KernelPlan plan;
    try {
      plan = make_plan(h, 1, batch);
    } catch (const ConfigError&) {
      continue;  // kernel larger than a batch; nothing to check
    }
    plan.validate();
    std::vector<ItemId> covered = plan.coverage();
    CHECK(covered == h.universe());
    for (const auto& b : plan.batches) CHECK(b.size() <= batch);
  }
}

TEST_CASE("cli: gen-image is byte identical across runs") {
  const fs::path dir = scratch_dir("cli_gen");
  const fs::path spec = dir / "spec.json";
  save_json(spec.string(), Json{{"count", 40}});
  const fs::path out1 = dir / "a.json", out2 = dir / "b.json";
  REQUIRE(run_cli("gen-image --spec " + spec.string() + " --seed 7 --out " +
                  out1.string()) == 0);
  REQUIRE(run_cli("gen-image --spec " + spec.string() + " --seed 7 --out " +
                  out2.string()) == 0);
  CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("cli: explicit-tree count matches the hand trace") {
  const fs::path dir = scratch_dir("cli_count");
  const auto f = test_helpers::drill_fixture();
  save_json((dir / "image.json").string(), to_json(f.image));
  save_json((dir / "tree.json").string(), to_json(f.tree));
  const fs::path out = dir / "report.json";
  REQUIRE(run_cli("count --image " + (dir / "image.json").string() +
                  " --tree " + (dir / "tree.json").string() +
                  " --k 20 --answers 3 --seed 1 --worker "
                  "'{\"epsilon\":0}' --out " +
                  out.string() + " --csv " + (dir / "row.csv").string()) == 0);
  const Json report = load_json(out.string());
  CHECK(report["final_count"] == 45);
  CHECK(report["total_tasks"] == 18);
  const std::string csv = slurp(dir / "row.csv");
  CHECK(csv ==
        "seed,k,total_tasks,final_count,true_count,saturated_leaves\n"
        "1,20,18,45,45,0\n");
}

TEST_CASE("cli: config errors exit with status two") {
  const fs::path dir = scratch_dir("cli_err");
  const fs::path cfg = dir / "bad.json";
  save_json(cfg.string(), Json{{"kind", "count"}, {"seeds", Json::array({1})},
                               {"image", Json{{"count", 5}}},
                               {"bogus", true}});
  CHECK(run_cli("run --config " + cfg.string() + " --out " +
                (dir / "out").string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.json").string() +
                " --out " + (dir / "out").string()) == 2);
}

TEST_CASE("cli: report over an empty directory succeeds") {
  const fs::path dir = scratch_dir("cli_report_empty");
  CHECK(run_cli("report --dir " + dir.string()) == 0);
}

TEST_CASE("cli: gen-items, cluster and merge round-trip") {
  const fs::path dir = scratch_dir("cli_cluster");
  // Items with two dimensions; the first groups pairwise.
  save_json((dir / "spec.json").string(), Json::parse(R"({
    "count": 12,
    "dimensions": [
      {"name": "s", "values": ["a","b","c","d"], "groups": [[0,1],[2,3]]},
      {"name": "c", "values": ["x","y"], "groups": []}
    ]})"));
  REQUIRE(run_cli("gen-items --spec " + (dir / "spec.json").string() +
                  " --out " + (dir / "items.json").string()) == 0);
  const Json gen = load_json((dir / "items.json").string());
  REQUIRE(gen["hierarchies"].size() == 2);
  const Hierarchy shape = hierarchy_from_json(gen["hierarchies"][0]);

  // Worker clusterings at two granularities of the first hierarchy.
  Json workers = Json::array();
  Clustering coarse = frontier_clustering(shape, depth_frontier(shape, 1));
  Clustering fine = frontier_clustering(shape, leaf_frontier(shape));
  fine.worker = 1;
  workers.push_back(to_json(coarse));
  workers.push_back(to_json(fine));
  save_json((dir / "workers.json").string(), workers);
  REQUIRE(run_cli("cluster --workers " + (dir / "workers.json").string() +
                  " --out " + (dir / "consensus.json").string() +
                  " --dot-graph " + (dir / "graph.dot").string() +
                  " --dot-tree " + (dir / "tree.dot").string()) == 0);
  const Json consensus = load_json((dir / "consensus.json").string());
  CHECK(consensus["clique"] == Json::parse("[0,1]"));
  CHECK(consensus["edges"] == Json::parse("[[0,1]]"));
  CHECK(slurp(dir / "graph.dot").find("w0 -- w1") != std::string::npos);
  CHECK(slurp(dir / "tree.dot").find("digraph") != std::string::npos);

  // Split the same truth into two kernel batches and merge via the CLI.
  // Two kernel items per class keep class and leaf signatures distinct.
  const KernelPlan plan = make_plan(shape, 2, 8);
  REQUIRE(plan.batches.size() >= 2);
  save_json((dir / "plan.json").string(), to_json(plan));
  std::string consensus_args;
  for (std::size_t b = 0; b < plan.batches.size(); ++b) {
    std::vector<ItemId> batch = plan.batches[b];
    std::sort(batch.begin(), batch.end());
    auto restrict = [&](const HFrontier& f) {
      Clustering c;
      for (int v : f.nodes) {
        std::vector<ItemId> cluster;
        std::set_intersection(shape.nodes[v].items.begin(),
                              shape.nodes[v].items.end(), batch.begin(),
                              batch.end(), std::back_inserter(cluster));
        if (!cluster.empty()) c.clusters.push_back(std::move(cluster));
      }
      return c;
    };
    const ConsensusHierarchy part = assemble_consensus(
        {restrict(depth_frontier(shape, 1)), restrict(leaf_frontier(shape))},
        batch);
    const std::string path =
        (dir / ("part" + std::to_string(b) + ".json")).string();
    save_json(path, to_json(part));
    consensus_args += " --consensus " + path;
  }
  REQUIRE(run_cli("merge" + consensus_args + " --plan " +
                  (dir / "plan.json").string() + " --out " +
                  (dir / "merged.json").string()) == 0);
  const ConsensusHierarchy merged =
      consensus_from_json(load_json((dir / "merged.json").string()));
  std::vector<std::vector<ItemId>> got, want;
  for (const auto& n : merged.tree.nodes) got.push_back(n.items);
  for (const auto& n : shape.nodes) want.push_back(n.items);
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  CHECK(got == want);
}

TEST_CASE("cli: counting over an ingested cell partition") {
  const fs::path dir = scratch_dir("cli_cells");
  const auto f = test_helpers::drill_fixture();
  save_json((dir / "image.json").string(), to_json(f.image));
  // Six cells with exact priors; k=20 groups them into >= 2 groups.
  CellPartition cells;
  cells.cells = {{Rect{0, 0, 60, 50}, 10},    {Rect{60, 0, 120, 50}, 8},
                 {Rect{0, 50, 40, 100}, 9},   {Rect{40, 50, 80, 100}, 8},
                 {Rect{80, 50, 120, 100}, 10}};
  cells.adjacency = {{0, 1}, {0, 2}, {2, 3}, {3, 4}, {1, 4}};
  save_json((dir / "cells.json").string(), to_json(cells));
  REQUIRE(run_cli("count --image " + (dir / "image.json").string() +
                  " --cells " + (dir / "cells.json").string() +
                  " --k 20 --answers 3 --seed 2 --worker '{\"epsilon\":0}'"
                  " --out " + (dir / "report.json").string()) == 0);
  const Json report = load_json((dir / "report.json").string());
  CHECK(report["final_count"] == 45);
}

TEST_CASE("cli: runtime failures exit with status three") {
  const fs::path dir = scratch_dir("cli_exit3");
  // Workers over different item universes cannot form a graph.
  Json workers = Json::array();
  workers.push_back(to_json(Clustering{0, {{0, 1}}}));
  workers.push_back(to_json(Clustering{1, {{0, 2}}}));
  save_json((dir / "workers.json").string(), workers);
  CHECK(run_cli("cluster --workers " + (dir / "workers.json").string() +
                " --out " + (dir / "out.json").string()) == 3);
}

TEST_CASE("cluster_merge and cluster_categorize run from parsed configs") {
  const Json merge_cfg = Json::parse(R"({
    "kind": "cluster_merge",
    "seeds": [1, 2],
    "items": {
      "count": 120,
      "dimensions": [
        {"name": "s",
         "values": ["a","b","c","d","e","f","g","h","i","j","k","l"],
         "groups": [[0,1,2,3],[4,5,6,7],[8,9,10,11]]}
      ]
    },
    "worker": {"perspective_weights": [1.0], "p_expand": 0.5,
               "e_item": 0.005},
    "algo": {"workers_per_batch": 7, "batch_size": 44, "kernel_per_class": 2}
  })");
  const RunSummary merged = run(parse_config(merge_cfg), 1);
  CHECK(merged.failures == 0);
  CHECK(merged.summary["metrics"]["matches_truth"]["mean"] == 1.0);

  const Json hybrid_cfg = Json::parse(R"({
    "kind": "cluster_categorize",
    "seeds": [1],
    "items": {
      "count": 200,
      "dimensions": [
        {"name": "s", "values": ["a","b","c","d","e","f","g","h"],
         "groups": []}
      ]
    },
    "worker": {"perspective_weights": [1.0], "e_item": 0.005, "e_cat": 0.1},
    "algo": {"workers_per_batch": 7, "batch_size": 40, "kernel_per_class": 2,
             "votes_per_item": 3, "clustered_items": 40}
  })");
  const RunSummary hybrid = run(parse_config(hybrid_cfg), 1);
  CHECK(hybrid.failures == 0);
  CHECK(hybrid.summary["metrics"]["categorized"]["mean"] == 160.0);
  CHECK(hybrid.summary["metrics"]["total_tasks"]["mean"] == 760.0);
}
