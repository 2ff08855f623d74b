#include "crowdsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <thread>

#include "crowdsim/errors.hpp"

namespace crowdsim {

namespace {

ExperimentKind kind_from_string(const std::string& s) {
  if (s == "count") return ExperimentKind::count;
  if (s == "count_prior") return ExperimentKind::count_prior;
  if (s == "cluster") return ExperimentKind::cluster;
  if (s == "cluster_merge") return ExperimentKind::cluster_merge;
  if (s == "cluster_categorize") return ExperimentKind::cluster_categorize;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

const char* kind_to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::count: return "count";
    case ExperimentKind::count_prior: return "count_prior";
    case ExperimentKind::cluster: return "cluster";
    case ExperimentKind::cluster_merge: return "cluster_merge";
    case ExperimentKind::cluster_categorize: return "cluster_categorize";
  }
  return "?";
}

bool is_count_kind(ExperimentKind k) {
  return k == ExperimentKind::count || k == ExperimentKind::count_prior;
}

void parse_worker(const Json& j, ExperimentConfig& cfg) {
  check_keys(j,
             {"k", "epsilon", "alpha", "p_small_err", "perspective_weights",
              "p_expand", "e_item", "e_cat"},
             "worker");
  if (j.contains("k")) cfg.count_worker.k = j["k"].get<std::int64_t>();
  if (j.contains("epsilon"))
    cfg.count_worker.epsilon = j["epsilon"].get<double>();
  if (j.contains("alpha")) cfg.count_worker.alpha = j["alpha"].get<double>();
  if (j.contains("p_small_err"))
    cfg.count_worker.p_small_err = j["p_small_err"].get<double>();
  if (j.contains("perspective_weights"))
    cfg.cluster_worker.perspective_weights =
        j["perspective_weights"].get<std::vector<double>>();
  if (j.contains("p_expand"))
    cfg.cluster_worker.p_expand = j["p_expand"].get<double>();
  if (j.contains("e_item"))
    cfg.cluster_worker.e_item = j["e_item"].get<double>();
  if (j.contains("e_cat")) cfg.cat_worker.e_cat = j["e_cat"].get<double>();
}

void parse_count_algo(const Json& j, CountAlgoConfig& algo) {
  check_keys(j,
             {"k", "answers_per_question", "leaf_area", "fanout",
              "adversarial_answers", "adversarial_range", "grid",
              "prior_noise", "grouping"},
             "algo");
  if (j.contains("k")) algo.k = j["k"].get<std::int64_t>();
  if (j.contains("answers_per_question"))
    algo.answers_per_question = j["answers_per_question"].get<int>();
  if (j.contains("leaf_area"))
    algo.leaf_area = j["leaf_area"].get<std::int64_t>();
  if (j.contains("fanout")) algo.fanout = j["fanout"].get<int>();
  if (j.contains("adversarial_answers"))
    algo.adversarial_answers = j["adversarial_answers"].get<int>();
  if (j.contains("adversarial_range")) {
    algo.adv_lo = j["adversarial_range"][0].get<std::int64_t>();
    algo.adv_hi = j["adversarial_range"][1].get<std::int64_t>();
  }
  if (j.contains("grid")) algo.grid = j["grid"].get<int>();
  if (j.contains("prior_noise"))
    algo.prior_noise = j["prior_noise"].get<double>();
  if (j.contains("grouping")) {
    const std::string g = j["grouping"].get<std::string>();
    if (g == "first_fit") {
      algo.grouping = GroupingStrategy::first_fit;
    } else if (g == "contiguous_greedy") {
      algo.grouping = GroupingStrategy::contiguous_greedy;
    } else {
      throw ConfigError("algo.grouping must be first_fit or contiguous_greedy");
    }
  }
}

void parse_cluster_algo(const Json& j, ClusterAlgoConfig& algo) {
  check_keys(j,
             {"workers_per_batch", "batch_size", "kernel_per_class",
              "votes_per_item", "clustered_items", "reference_dimension",
              "explicit_workers"},
             "algo");
  if (j.contains("workers_per_batch"))
    algo.workers_per_batch = j["workers_per_batch"].get<int>();
  if (j.contains("batch_size"))
    algo.batch_size = j["batch_size"].get<std::size_t>();
  if (j.contains("kernel_per_class"))
    algo.kernel_per_class = j["kernel_per_class"].get<int>();
  if (j.contains("votes_per_item"))
    algo.votes_per_item = j["votes_per_item"].get<int>();
  if (j.contains("clustered_items"))
    algo.clustered_items = j["clustered_items"].get<std::size_t>();
  if (j.contains("reference_dimension"))
    algo.reference_dimension = j["reference_dimension"].get<std::size_t>();
  if (j.contains("explicit_workers")) {
    for (const Json& w : j["explicit_workers"]) {
      check_keys(w, {"hierarchy", "depth", "frontier_nodes"},
                 "algo.explicit_workers[]");
      ExplicitWorker ew;
      ew.hierarchy = w.value("hierarchy", std::size_t{0});
      if (w.contains("depth")) ew.depth = w["depth"].get<int>();
      if (w.contains("frontier_nodes"))
        ew.frontier_nodes = w["frontier_nodes"].get<std::vector<int>>();
      if (!ew.depth.has_value() && ew.frontier_nodes.empty())
        throw ConfigError("explicit worker needs a depth or frontier_nodes");
      algo.explicit_workers.push_back(std::move(ew));
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  check_keys(j, {"kind", "seeds", "out", "image", "items", "worker", "algo"},
             "config");
  ExperimentConfig cfg;
  if (!j.contains("kind")) throw ConfigError("config: missing 'kind'");
  cfg.kind = kind_from_string(j["kind"].get<std::string>());
  if (!j.contains("seeds") || !j["seeds"].is_array() || j["seeds"].empty())
    throw ConfigError("config: 'seeds' must be a nonempty array");
  cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();

  if (is_count_kind(cfg.kind)) {
    if (!j.contains("image"))
      throw ConfigError("config: counting experiments need 'image'");
    cfg.image = image_spec_from_json(j["image"]);
  } else {
    if (!j.contains("items"))
      throw ConfigError("config: clustering experiments need 'items'");
    cfg.items = universe_spec_from_json(j["items"]);
    if (cfg.items.dimensions.empty())
      throw ConfigError("config: items need at least one dimension");
  }
  if (j.contains("worker")) parse_worker(j["worker"], cfg);
  if (j.contains("algo")) {
    if (is_count_kind(cfg.kind)) {
      parse_count_algo(j["algo"], cfg.count_algo);
    } else {
      parse_cluster_algo(j["algo"], cfg.cluster_algo);
    }
  }

  // Validate everything up front; a bad parameter must fail before any run.
  cfg.count_worker.validate();
  cfg.cat_worker.validate();
  if (!is_count_kind(cfg.kind)) {
    if (cfg.cluster_worker.perspective_weights.empty()) {
      cfg.cluster_worker.perspective_weights.assign(
          cfg.items.dimensions.size(),
          1.0 / double(cfg.items.dimensions.size()));
    }
    cfg.cluster_worker.validate();
    if (cfg.cluster_worker.perspective_weights.size() !=
        cfg.items.dimensions.size())
      throw ConfigError("one perspective weight per item dimension");
    if (cfg.cluster_algo.reference_dimension >= cfg.items.dimensions.size())
      throw ConfigError("reference_dimension out of range");
    if (cfg.cluster_algo.votes_per_item < 1 ||
        cfg.cluster_algo.votes_per_item % 2 == 0)
      throw ConfigError("votes_per_item must be odd");
    for (const ExplicitWorker& w : cfg.cluster_algo.explicit_workers)
      if (w.hierarchy >= cfg.items.dimensions.size())
        throw ConfigError("explicit worker references an unknown hierarchy");
  } else {
    if (cfg.count_algo.k < 1) throw ConfigError("algo.k must be >= 1");
    if (cfg.count_algo.answers_per_question < 1)
      throw ConfigError("answers_per_question must be >= 1");
    if (cfg.count_algo.adversarial_answers >
        cfg.count_algo.answers_per_question)
      throw ConfigError("more adversarial answers than answers per question");
  }
  return cfg;
}

HFrontier expected_ml_frontier(const Hierarchy& h, double p_expand) {
  // Membership probability of a node in a sampled frontier: every ancestor
  // below the root expands with probability p, the root always expands, and
  // the node itself stops (leaves always stop).
  std::vector<double> weight(h.nodes.size(), 0.0);
  auto assign = [&](auto&& self, int v, double reach) -> void {
    if (h.is_leaf(v)) {
      weight[v] = reach;
      return;
    }
    const bool root = h.nodes[v].parent < 0;
    weight[v] = root ? 0.0 : reach * (1.0 - p_expand);
    const double down = root ? reach : reach * p_expand;
    for (int c : h.nodes[v].children) self(self, c, down);
  };
  assign(assign, 0, 1.0);

  std::vector<char> take(h.nodes.size(), 0);
  auto solve = [&](auto&& self, int v) -> double {
    if (h.is_leaf(v)) {
      take[v] = 1;
      return weight[v];
    }
    double sum = 0.0;
    for (int c : h.nodes[v].children) sum += self(self, c);
    take[v] = weight[v] >= sum;
    return take[v] ? weight[v] : sum;
  };
  solve(solve, 0);

  HFrontier f;
  auto collect = [&](auto&& self, int v) -> void {
    if (take[v]) {
      f.nodes.push_back(v);
      return;
    }
    for (int c : h.nodes[v].children) self(self, c);
  };
  collect(collect, 0);
  return f;
}

KernelPlan make_plan(const Hierarchy& reference, int kernel_per_class,
                     std::size_t batch_size,
                     const std::vector<ItemId>& subset) {
  if (kernel_per_class < 0) throw ConfigError("kernel_per_class must be >= 0");
  std::vector<ItemId> packable =
      subset.empty() ? reference.universe() : subset;
  std::sort(packable.begin(), packable.end());

  KernelPlan plan;
  // Kernel items for a class are drawn round-robin across its leaves, so a
  // class signature never coincides with a single descendant's signature.
  const HFrontier classes = depth_frontier(reference, 1);
  for (int v : classes.nodes) {
    std::vector<std::vector<ItemId>> pools;
    auto leaves_of = [&](auto&& self, int u) -> void {
      if (reference.is_leaf(u)) {
        std::vector<ItemId> pool;
        std::set_intersection(reference.nodes[u].items.begin(),
                              reference.nodes[u].items.end(),
                              packable.begin(), packable.end(),
                              std::back_inserter(pool));
        if (!pool.empty()) pools.push_back(std::move(pool));
        return;
      }
      for (int c : reference.nodes[u].children) self(self, c);
    };
    leaves_of(leaves_of, v);
    int taken = 0;
    for (std::size_t round = 0; taken < kernel_per_class; ++round) {
      bool any = false;
      for (std::size_t p = 0; p < pools.size() && taken < kernel_per_class;
           ++p)
        if (round < pools[p].size()) {
          plan.kernel.push_back(pools[p][round]);
          ++taken;
          any = true;
        }
      if (!any) break;  // class exhausted
    }
  }
  std::sort(plan.kernel.begin(), plan.kernel.end());
  if (plan.kernel.size() >= batch_size)
    throw ConfigError("kernel does not fit in a batch");

  std::vector<ItemId> kernel_sorted = plan.kernel;
  const std::size_t room = batch_size - plan.kernel.size();

  // Pack leaf remnants whole where possible, splitting only oversized ones.
  std::vector<std::vector<ItemId>> chunks;
  const HFrontier leaves = leaf_frontier(reference);
  for (int v : leaves.nodes) {
    std::vector<ItemId> in_leaf;
    std::set_intersection(reference.nodes[v].items.begin(),
                          reference.nodes[v].items.end(), packable.begin(),
                          packable.end(), std::back_inserter(in_leaf));
    std::vector<ItemId> remnant;
    std::set_difference(in_leaf.begin(), in_leaf.end(), kernel_sorted.begin(),
                        kernel_sorted.end(), std::back_inserter(remnant));
    for (std::size_t at = 0; at < remnant.size(); at += room)
      chunks.emplace_back(remnant.begin() + at,
                          remnant.begin() +
                              std::min(remnant.size(), at + room));
  }

  std::vector<ItemId> current = plan.kernel;
  for (const auto& chunk : chunks) {
    if (current.size() + chunk.size() > batch_size) {
      plan.batches.push_back(current);
      current = plan.kernel;
    }
    current.insert(current.end(), chunk.begin(), chunk.end());
  }
  plan.batches.push_back(current);
  for (auto& b : plan.batches) std::sort(b.begin(), b.end());
  plan.validate();
  return plan;
}

std::vector<ItemId> stratified_subset(const Hierarchy& reference,
                                      std::size_t n) {
  const HFrontier leaves = leaf_frontier(reference);
  std::vector<const std::vector<ItemId>*> pools;
  for (int v : leaves.nodes) pools.push_back(&reference.nodes[v].items);

  std::vector<ItemId> chosen;
  std::vector<std::size_t> next(pools.size(), 0);
  bool progress = true;
  while (chosen.size() < n && progress) {
    progress = false;
    for (std::size_t p = 0; p < pools.size() && chosen.size() < n; ++p) {
      if (next[p] < pools[p]->size()) {
        chosen.push_back((*pools[p])[next[p]++]);
        progress = true;
      }
    }
  }
  if (chosen.size() < n)
    throw ConfigError("not enough items for the clustered subset");
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

struct ClusterContext {
  std::vector<Item> items;
  std::vector<ItemId> ids;
  std::vector<Hierarchy> truth;
  Clustering reference;
};

ClusterContext make_cluster_context(const ExperimentConfig& cfg) {
  ClusterContext ctx;
  ctx.items = generate_items(cfg.items);
  for (const Item& it : ctx.items) ctx.ids.push_back(it.id);
  for (std::size_t d = 0; d < cfg.items.dimensions.size(); ++d)
    ctx.truth.push_back(dimension_hierarchy(cfg.items, ctx.items, d));
  const Hierarchy& ref = ctx.truth[cfg.cluster_algo.reference_dimension];
  ctx.reference = frontier_clustering(
      ref, expected_ml_frontier(ref, cfg.cluster_worker.p_expand));
  return ctx;
}

std::vector<Clustering> make_workers(const ExperimentConfig& cfg,
                                     const ClusterContext& ctx,
                                     std::uint64_t seed) {
  std::vector<Clustering> workers;
  if (!cfg.cluster_algo.explicit_workers.empty()) {
    for (const ExplicitWorker& ew : cfg.cluster_algo.explicit_workers) {
      const Hierarchy& h = ctx.truth.at(ew.hierarchy);
      const HFrontier f = ew.frontier_nodes.empty()
                              ? depth_frontier(h, *ew.depth)
                              : HFrontier{ew.frontier_nodes};
      Clustering c = frontier_clustering(h, f);
      c.worker = static_cast<WorkerId>(workers.size());
      workers.push_back(std::move(c));
    }
  } else {
    for (int w = 0; w < cfg.cluster_algo.workers_per_batch; ++w) {
      Clustering c = answer_clustering(cfg.cluster_worker, ctx.ids, ctx.truth,
                                       derive(RngSeed{seed}, 0xc1, w));
      c.worker = static_cast<WorkerId>(w);
      workers.push_back(std::move(c));
    }
  }
  return workers;
}

void push_eval(SeedResult& r, const ClusterEval& eval, const CostReport& cost) {
  r.row.emplace_back("pair_recall", eval.pair_recall);
  r.row.emplace_back("pair_precision", eval.pair_precision);
  r.row.emplace_back("pair_accuracy", eval.pair_accuracy);
  r.row.emplace_back("clustering_tasks", double(cost.clustering_tasks));
  r.row.emplace_back("categorization_tasks",
                     double(cost.categorization_tasks));
  r.row.emplace_back("total_tasks", double(cost.total()));
  r.report["eval"] = to_json(eval);
  r.report["cost"] = to_json(cost);
}

void run_count_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                    SeedResult& r) {
  const SyntheticImage image =
      generate_image(cfg.image, derive(RngSeed{seed}, 0x1a));
  const CountAlgoConfig& algo = cfg.count_algo;

  SegTree tree;
  if (cfg.kind == ExperimentKind::count) {
    tree = build_tree(image, {algo.leaf_area, algo.fanout});
  } else {
    const CellPartition cells = grid_partition(
        image, algo.grid, algo.prior_noise, derive(RngSeed{seed}, 0x9e));
    // Group against a noise margin so a group whose prior underestimates
    // the truth still lands below the drill-down threshold.
    const std::int64_t capacity = std::max<std::int64_t>(
        1, std::int64_t(std::floor(double(algo.k) * (1.0 - algo.prior_noise))));
    const auto groups = group_cells(cells, capacity, algo.grouping);
    tree = build_prior_tree(groups, cells, algo.fanout).tree;
  }

  CountingPanel panel{cfg.count_worker, algo.adversarial_answers, algo.adv_lo,
                      algo.adv_hi};
  const CountRunReport run = frontier_count(
      tree, image, panel, algo.k, algo.answers_per_question,
      derive(RngSeed{seed}, 0xc0));
  const CountEval eval = count_eval(run, image);

  r.row.emplace_back("k", double(algo.k));
  r.row.emplace_back("total_tasks", double(run.total_tasks));
  r.row.emplace_back("final_count", double(run.final_count));
  r.row.emplace_back("true_count", double(image.total_objects()));
  r.row.emplace_back("saturated_leaves", double(run.saturated.size()));
  r.row.emplace_back("abs_error", double(eval.abs_error));
  r.row.emplace_back("rel_error", eval.rel_error);
  r.report["run"] = to_json(run);
  r.report["true_count"] = image.total_objects();
  r.report["rel_error"] = eval.rel_error;
}

void run_cluster_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                      SeedResult& r) {
  const ClusterContext ctx = make_cluster_context(cfg);
  const auto workers = make_workers(cfg, ctx, seed);
  const ClusteringGraph graph = build_clustering_graph(workers);
  const auto clique = max_clique(graph);
  std::vector<Clustering> chosen;
  for (int w : clique) chosen.push_back(graph.workers[w]);
  const ConsensusHierarchy consensus = assemble_consensus(chosen, ctx.ids);
  const HFrontier frontier = ml_frontier(consensus);
  const Clustering partition = frontier_clustering(consensus.tree, frontier);

  CostReport cost;
  cost.clustering_tasks =
      std::int64_t(ctx.ids.size()) * std::int64_t(workers.size());
  const ClusterEval eval = pairwise_eval(partition, ctx.reference);

  Json edges = Json::array();
  for (const auto& [a, b] : graph.edges) edges.push_back(Json::array({a, b}));
  r.report["edges"] = std::move(edges);
  r.report["clique"] = clique;
  r.report["consensus"] = to_json(consensus);
  r.report["partition"] = to_json(partition);
  r.row.emplace_back("workers", double(workers.size()));
  r.row.emplace_back("clique_size", double(clique.size()));
  push_eval(r, eval, cost);
}

ClusterStageConfig stage_config(const ExperimentConfig& cfg,
                                const ClusterContext& ctx) {
  ClusterStageConfig stage;
  stage.workers_per_batch = cfg.cluster_algo.workers_per_batch;
  stage.worker = cfg.cluster_worker;
  stage.truth = ctx.truth;
  return stage;
}

bool same_node_sets(const Hierarchy& a, const Hierarchy& b) {
  std::vector<std::vector<ItemId>> sa, sb;
  for (const auto& n : a.nodes) sa.push_back(n.items);
  for (const auto& n : b.nodes) sb.push_back(n.items);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

void run_cluster_merge_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                            SeedResult& r) {
  const ClusterContext ctx = make_cluster_context(cfg);
  const Hierarchy& ref = ctx.truth[cfg.cluster_algo.reference_dimension];
  const KernelPlan plan = make_plan(ref, cfg.cluster_algo.kernel_per_class,
                                    cfg.cluster_algo.batch_size);
  const PipelineOutcome out =
      cluster_pipeline(plan, stage_config(cfg, ctx), RngSeed{seed});
  const ClusterEval eval = pairwise_eval(out.partition, ctx.reference);

  r.report["plan"] = to_json(plan);
  r.report["consensus"] = to_json(out.merged);
  r.report["partition"] = to_json(out.partition);
  r.report["matches_truth"] = same_node_sets(out.merged.tree, ref);
  r.row.emplace_back("batches", double(plan.batches.size()));
  r.row.emplace_back("matches_truth",
                     same_node_sets(out.merged.tree, ref) ? 1.0 : 0.0);
  push_eval(r, eval, out.cost);
}

void run_cluster_categorize_seed(const ExperimentConfig& cfg,
                                 std::uint64_t seed, SeedResult& r) {
  const ClusterContext ctx = make_cluster_context(cfg);
  const Hierarchy& ref = ctx.truth[cfg.cluster_algo.reference_dimension];
  const std::vector<ItemId> clustered =
      stratified_subset(ref, cfg.cluster_algo.clustered_items);
  const KernelPlan plan = make_plan(ref, cfg.cluster_algo.kernel_per_class,
                                    cfg.cluster_algo.batch_size, clustered);
  const HybridOutcome out = cluster_then_categorize(
      ctx.ids, plan, stage_config(cfg, ctx), cfg.cat_worker,
      cfg.cluster_algo.votes_per_item, cfg.cluster_algo.reference_dimension,
      RngSeed{seed});
  const ClusterEval eval = pairwise_eval(out.partition, ctx.reference);

  r.report["plan"] = to_json(plan);
  r.report["consensus"] = to_json(out.merged);
  r.report["partition"] = to_json(out.partition);
  r.row.emplace_back("clustered", double(clustered.size()));
  r.row.emplace_back("categorized",
                     double(ctx.ids.size() - clustered.size()));
  push_eval(r, eval, out.cost);
}

}  // namespace

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedResult r;
  r.seed = seed;
  r.report = Json{{"seed", seed}, {"kind", kind_to_string(cfg.kind)}};
  r.row.emplace_back("seed", double(seed));
  try {
    switch (cfg.kind) {
      case ExperimentKind::count:
      case ExperimentKind::count_prior:
        run_count_seed(cfg, seed, r);
        break;
      case ExperimentKind::cluster:
        run_cluster_seed(cfg, seed, r);
        break;
      case ExperimentKind::cluster_merge:
        run_cluster_merge_seed(cfg, seed, r);
        break;
      case ExperimentKind::cluster_categorize:
        run_cluster_categorize_seed(cfg, seed, r);
        break;
    }
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
    r.report = Json{{"seed", seed},
                    {"kind", kind_to_string(cfg.kind)},
                    {"error", r.error}};
  }
  return r;
}

namespace {

std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 9.0e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json summarize_results(const std::vector<SeedResult>& results) {
  Json errors = Json::array();
  std::vector<std::string> field_order;
  std::map<std::string, std::vector<double>> samples;
  int ok = 0;
  for (const SeedResult& r : results) {
    if (r.failed) {
      errors.push_back(Json{{"seed", r.seed}, {"error", r.error}});
      continue;
    }
    ++ok;
    for (const auto& [name, value] : r.row) {
      if (!samples.count(name)) field_order.push_back(name);
      samples[name].push_back(value);
    }
  }
  Json metrics = Json::object();
  for (const std::string& name : field_order) {
    if (name == "seed") continue;
    const auto& xs = samples[name];
    const double mean =
        std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= double(xs.size());
    metrics[name] = Json{{"mean", mean}, {"stddev", std::sqrt(var)}};
  }
  return Json{{"runs", results.size()},
              {"succeeded", ok},
              {"failed", results.size() - ok},
              {"errors", std::move(errors)},
              {"metrics", std::move(metrics)}};
}

}  // namespace

RunSummary run(const ExperimentConfig& cfg, int parallel) {
  RunSummary out;
  out.results.resize(cfg.seeds.size());

  const int threads =
      std::max(1, std::min<int>(parallel, int(cfg.seeds.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      out.results[i] = run_seed(cfg, cfg.seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cfg.seeds.size();
             i = next.fetch_add(1))
          out.results[i] = run_seed(cfg, cfg.seeds[i]);
      });
    for (auto& th : pool) th.join();
  }

  for (const SeedResult& r : out.results)
    if (r.failed) ++out.failures;
  out.summary = summarize_results(out.results);
  out.summary["kind"] = kind_to_string(cfg.kind);

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::string csv;
    for (const SeedResult& r : out.results) {
      save_json(cfg.out_dir + "/seed_" + std::to_string(r.seed) + ".json",
                r.report);
      if (r.failed) continue;
      if (csv.empty()) {
        for (std::size_t i = 0; i < r.row.size(); ++i)
          csv += std::string(i ? "," : "") + r.row[i].first;
        csv += "\n";
      }
      for (std::size_t i = 0; i < r.row.size(); ++i)
        csv += std::string(i ? "," : "") + format_number(r.row[i].second);
      csv += "\n";
    }
    save_text(cfg.out_dir + "/rows.csv", csv);
    save_json(cfg.out_dir + "/summary.json", out.summary);
    std::string scsv = "metric,mean,stddev\n";
    for (const auto& [name, stats] : out.summary["metrics"].items())
      scsv += name + "," + format_number(stats["mean"].get<double>()) + "," +
              format_number(stats["stddev"].get<double>()) + "\n";
    save_text(cfg.out_dir + "/summary.csv", scsv);
  }
  return out;
}

Json summarize_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("seed_", 0) == 0 && entry.path().extension() == ".json")
        files.push_back(entry.path());
    }
  std::sort(files.begin(), files.end());

  std::vector<SeedResult> results;
  for (const fs::path& p : files) {
    const Json j = load_json(p.string());
    SeedResult r;
    r.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("error")) {
      r.failed = true;
      r.error = j["error"].get<std::string>();
    } else {
      // Numeric scalars become summary fields; nested reports are skipped.
      for (const auto& [key, value] : j.items())
        if (value.is_number() && key != "seed")
          r.row.emplace_back(key, value.get<double>());
      if (j.contains("eval"))
        for (const auto& [key, value] : j["eval"].items())
          r.row.emplace_back(key, value.get<double>());
      if (j.contains("cost"))
        for (const auto& [key, value] : j["cost"].items())
          r.row.emplace_back(key, value.get<double>());
    }
    results.push_back(std::move(r));
  }
  return summarize_results(results);
}

}  // namespace crowdsim
