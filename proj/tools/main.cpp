// Command-line runner: reproducible counting and clustering experiments
// over simulated worker populations, plus file-level utilities for the
// JSON formats used by the library.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdsim/errors.hpp"
#include "crowdsim/experiment.hpp"
#include "crowdsim/prior.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

using namespace crowdsim;

int cmd_gen_image(const std::string& spec_path, std::uint64_t seed,
                  const std::string& out_path) {
  const ImageGenSpec spec = image_spec_from_json(load_json(spec_path));
  const SyntheticImage img = generate_image(spec, RngSeed{seed});
  save_json(out_path, to_json(img));
  return kExitOk;
}

int cmd_gen_items(const std::string& spec_path, const std::string& out_path) {
  const ItemUniverseSpec spec = universe_spec_from_json(load_json(spec_path));
  const std::vector<Item> items = generate_items(spec);
  Json hierarchies = Json::array();
  for (std::size_t d = 0; d < spec.dimensions.size(); ++d)
    hierarchies.push_back(to_json(dimension_hierarchy(spec, items, d)));
  save_json(out_path, Json{{"items", to_json(items)},
                           {"hierarchies", std::move(hierarchies)}});
  return kExitOk;
}

int cmd_count(const std::string& image_path, const std::string& tree_path,
              const std::string& cells_path, const std::string& grouping,
              std::int64_t leaf_area, int fanout, std::int64_t k, int answers,
              std::uint64_t seed, const Json& worker_json,
              const std::string& out_path, const std::string& csv_path) {
  const SyntheticImage image = image_from_json(load_json(image_path));
  SegTree tree;
  if (!tree_path.empty()) {
    tree = seg_tree_from_json(load_json(tree_path));
    if (tree.root().region.parts.front() != image.bounds())
      throw ConfigError("tree root does not match the image bounds");
  } else if (!cells_path.empty()) {
    const CellPartition cells = cell_partition_from_json(load_json(cells_path));
    const GroupingStrategy strategy = grouping == "first_fit"
                                          ? GroupingStrategy::first_fit
                                          : GroupingStrategy::contiguous_greedy;
    tree = build_prior_tree(group_cells(cells, k, strategy), cells, fanout).tree;
  } else {
    tree = build_tree(image, {leaf_area, fanout});
  }
  CountingPanel panel;
  if (!worker_json.is_null()) {
    check_keys(worker_json, {"k", "epsilon", "alpha", "p_small_err"},
               "worker");
    if (worker_json.contains("k"))
      panel.honest.k = worker_json["k"].get<std::int64_t>();
    if (worker_json.contains("epsilon"))
      panel.honest.epsilon = worker_json["epsilon"].get<double>();
    if (worker_json.contains("alpha"))
      panel.honest.alpha = worker_json["alpha"].get<double>();
    if (worker_json.contains("p_small_err"))
      panel.honest.p_small_err = worker_json["p_small_err"].get<double>();
  }
  const CountRunReport report =
      frontier_count(tree, image, panel, k, answers, RngSeed{seed});
  save_json(out_path, to_json(report));
  if (!csv_path.empty()) {
    const std::int64_t truth = image.total_objects();
    std::string csv =
        "seed,k,total_tasks,final_count,true_count,saturated_leaves\n";
    csv += std::to_string(seed) + "," + std::to_string(k) + "," +
           std::to_string(report.total_tasks) + "," +
           std::to_string(report.final_count) + "," + std::to_string(truth) +
           "," + std::to_string(report.saturated.size()) + "\n";
    save_text(csv_path, csv);
  }
  return kExitOk;
}

int cmd_cluster(const std::string& workers_path, const std::string& out_path,
                const std::string& dot_graph, const std::string& dot_tree) {
  const Json j = load_json(workers_path);
  std::vector<Clustering> workers;
  for (const Json& w : j) workers.push_back(clustering_from_json(w));
  const ClusteringGraph graph = build_clustering_graph(std::move(workers));
  const auto clique = max_clique(graph);
  std::vector<Clustering> chosen;
  for (int w : clique) chosen.push_back(graph.workers[w]);
  const auto universe = graph.workers.empty()
                            ? std::vector<ItemId>{}
                            : graph.workers.front().universe();
  Json out = Json::object();
  Json edges = Json::array();
  for (const auto& [a, b] : graph.edges) edges.push_back(Json::array({a, b}));
  out["edges"] = std::move(edges);
  out["clique"] = clique;
  if (!chosen.empty()) {
    const ConsensusHierarchy consensus = assemble_consensus(chosen, universe);
    out["consensus"] = to_json(consensus);
    const HFrontier frontier = ml_frontier(consensus);
    out["ml_frontier_clusters"] =
        to_json(frontier_clustering(consensus.tree, frontier))["clusters"];
    if (!dot_tree.empty()) save_text(dot_tree, to_dot(consensus));
  }
  if (!dot_graph.empty()) save_text(dot_graph, to_dot(graph));
  save_json(out_path, out);
  return kExitOk;
}

int cmd_merge(const std::vector<std::string>& consensus_paths,
              const std::string& plan_path, const std::string& out_path) {
  const KernelPlan plan = kernel_plan_from_json(load_json(plan_path));
  std::vector<ConsensusHierarchy> parts;
  for (const std::string& p : consensus_paths)
    parts.push_back(consensus_from_json(load_json(p)));
  save_json(out_path, to_json(merge_batches(parts, plan)));
  return kExitOk;
}

int cmd_report(const std::string& dir, const std::string& out_path) {
  const Json summary = summarize_directory(dir);
  if (out_path.empty()) {
    std::printf("%s\n", summary.dump(2).c_str());
  } else {
    save_json(out_path, summary);
  }
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& seeds_override, int parallel) {
  Json j = load_json(config_path);
  if (!seeds_override.empty()) {
    Json seeds = Json::array();
    std::size_t at = 0;
    while (at < seeds_override.size()) {
      std::size_t comma = seeds_override.find(',', at);
      if (comma == std::string::npos) comma = seeds_override.size();
      try {
        seeds.push_back(std::stoull(seeds_override.substr(at, comma - at)));
      } catch (const std::exception&) {
        throw ConfigError("--seeds expects comma-separated integers");
      }
      at = comma + 1;
    }
    j["seeds"] = std::move(seeds);
  }
  ExperimentConfig cfg = parse_config(j);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (cfg.out_dir.empty())
    throw ConfigError("no output directory: set 'out' in the config or --out");
  const RunSummary summary = run(cfg, parallel);
  std::printf("%zu/%zu seeds succeeded; reports in %s\n",
              summary.results.size() - summary.failures,
              summary.results.size(), cfg.out_dir.c_str());
  return summary.failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd counting and clustering simulation bench"};
  app.require_subcommand(1);

  std::string spec_path, out_path, csv_path, tree_path, image_path;
  std::string workers_path, plan_path, dir, config_path, out_override;
  std::string seeds_override, dot_graph, dot_tree, worker_params;
  std::string cells_path, grouping = "contiguous_greedy";
  std::vector<std::string> consensus_paths;
  std::uint64_t seed = 0;
  std::int64_t k = 20, leaf_area = 64;
  int answers = 3, fanout = 2, parallel = 1;

  auto* gen_image = app.add_subcommand("gen-image", "Generate a synthetic image");
  gen_image->add_option("--spec", spec_path)->required();
  gen_image->add_option("--seed", seed)->required();
  gen_image->add_option("--out", out_path)->required();

  auto* gen_items = app.add_subcommand(
      "gen-items", "Generate items and their ground-truth hierarchies");
  gen_items->add_option("--spec", spec_path)->required();
  gen_items->add_option("--out", out_path)->required();

  auto* count = app.add_subcommand("count", "One drill-down counting run");
  count->add_option("--image", image_path)->required();
  count->add_option("--tree", tree_path);
  count->add_option("--cells", cells_path,
                    "Cell partition with priors; builds a prior-planned tree");
  count->add_option("--grouping", grouping)
      ->check(CLI::IsMember({"first_fit", "contiguous_greedy"}));
  count->add_option("--leaf-area", leaf_area);
  count->add_option("--fanout", fanout);
  count->add_option("--k", k);
  count->add_option("--answers", answers);
  count->add_option("--seed", seed);
  count->add_option("--worker", worker_params,
                    "JSON object with k/epsilon/alpha/p_small_err");
  count->add_option("--out", out_path)->required();
  count->add_option("--csv", csv_path);

  auto* cluster = app.add_subcommand(
      "cluster", "Graph, clique and consensus from worker clusterings");
  cluster->add_option("--workers", workers_path)->required();
  cluster->add_option("--out", out_path)->required();
  cluster->add_option("--dot-graph", dot_graph);
  cluster->add_option("--dot-tree", dot_tree);

  auto* merge = app.add_subcommand("merge", "Merge batch consensus hierarchies");
  merge->add_option("--consensus", consensus_paths)->required();
  merge->add_option("--plan", plan_path)->required();
  merge->add_option("--out", out_path)->required();

  auto* report = app.add_subcommand("report", "Summarize a run directory");
  report->add_option("--dir", dir)->required();
  report->add_option("--out", out_path);

  auto* run_cmd = app.add_subcommand("run", "Run a configured experiment sweep");
  run_cmd->add_option("--config", config_path)->required();
  run_cmd->add_option("--out", out_override);
  run_cmd->add_option("--seeds", seeds_override, "Override the seed list");
  run_cmd->add_option("--parallel", parallel);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_image->parsed()) return cmd_gen_image(spec_path, seed, out_path);
    if (gen_items->parsed()) return cmd_gen_items(spec_path, out_path);
    if (count->parsed()) {
      Json worker_json;
      if (!worker_params.empty()) worker_json = Json::parse(worker_params);
      return cmd_count(image_path, tree_path, cells_path, grouping,
                       leaf_area, fanout, k, answers, seed, worker_json,
                       out_path, csv_path);
    }
    if (cluster->parsed())
      return cmd_cluster(workers_path, out_path, dot_graph, dot_tree);
    if (merge->parsed()) return cmd_merge(consensus_paths, plan_path, out_path);
    if (report->parsed()) return cmd_report(dir, out_path);
    if (run_cmd->parsed())
      return cmd_run(config_path, out_override, seeds_override, parallel);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
