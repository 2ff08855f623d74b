#include "crowdsim/json_io.hpp"

#include <filesystem>
#include <fstream>

#include "crowdsim/errors.hpp"

namespace crowdsim {

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

}  // namespace

Json to_json(const Rect& r) { return Json::array({r.x0, r.y0, r.x1, r.y1}); }

Rect rect_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4)
    throw ConfigError("rect must be [x0, y0, x1, y1]");
  return Rect{j[0].get<std::int64_t>(), j[1].get<std::int64_t>(),
              j[2].get<std::int64_t>(), j[3].get<std::int64_t>()};
}

Json to_json(const SyntheticImage& img) {
  Json objects = Json::array();
  for (const ObjectExtent& o : img.objects)
    objects.push_back(Json{{"id", o.id}, {"rect", to_json(o.rect)}});
  return Json{{"width", img.width},
              {"height", img.height},
              {"objects", std::move(objects)}};
}

SyntheticImage image_from_json(const Json& j) {
  check_keys(j, {"width", "height", "objects"}, "image");
  SyntheticImage img;
  img.width = require(j, "width", "image").get<std::int64_t>();
  img.height = require(j, "height", "image").get<std::int64_t>();
  for (const Json& o : require(j, "objects", "image")) {
    check_keys(o, {"id", "rect"}, "image.objects[]");
    img.objects.push_back({o.at("id").get<ObjectId>(),
                           rect_from_json(o.at("rect"))});
  }
  img.validate();
  return img;
}

Json to_json(const ImageGenSpec& spec) {
  return Json{{"count", spec.count},
              {"width", spec.width},
              {"height", spec.height},
              {"min_size", Json::array({spec.min_w, spec.min_h})},
              {"max_size", Json::array({spec.max_w, spec.max_h})},
              {"layout", spec.layout == Layout::uniform ? "uniform"
                                                        : "clustered"},
              {"clusters", spec.clusters},
              {"spread", spec.spread},
              {"attempts_per_object", spec.attempts_per_object}};
}

ImageGenSpec image_spec_from_json(const Json& j) {
  check_keys(j,
             {"count", "width", "height", "min_size", "max_size", "layout",
              "clusters", "spread", "attempts_per_object"},
             "image spec");
  ImageGenSpec spec;
  spec.count = require(j, "count", "image spec").get<std::int64_t>();
  if (j.contains("width")) spec.width = j["width"].get<std::int64_t>();
  if (j.contains("height")) spec.height = j["height"].get<std::int64_t>();
  if (j.contains("min_size")) {
    spec.min_w = j["min_size"][0].get<std::int64_t>();
    spec.min_h = j["min_size"][1].get<std::int64_t>();
  }
  if (j.contains("max_size")) {
    spec.max_w = j["max_size"][0].get<std::int64_t>();
    spec.max_h = j["max_size"][1].get<std::int64_t>();
  }
  if (j.contains("layout")) {
    const std::string layout = j["layout"].get<std::string>();
    if (layout == "uniform") {
      spec.layout = Layout::uniform;
    } else if (layout == "clustered") {
      spec.layout = Layout::clustered;
    } else {
      throw ConfigError("image spec: layout must be uniform or clustered");
    }
  }
  if (j.contains("clusters")) spec.clusters = j["clusters"].get<int>();
  if (j.contains("spread")) spec.spread = j["spread"].get<double>();
  if (j.contains("attempts_per_object"))
    spec.attempts_per_object = j["attempts_per_object"].get<int>();
  return spec;
}

Json to_json(const std::vector<Item>& items) {
  Json arr = Json::array();
  for (const Item& it : items)
    arr.push_back(Json{{"id", it.id}, {"features", it.features}});
  return arr;
}

std::vector<Item> items_from_json(const Json& j) {
  std::vector<Item> items;
  for (const Json& o : j) {
    check_keys(o, {"id", "features"}, "items[]");
    Item it;
    it.id = o.at("id").get<ItemId>();
    for (const Json& f : o.at("features"))
      it.features.push_back(f.get<std::string>());
    items.push_back(std::move(it));
  }
  return items;
}

Json to_json(const ItemUniverseSpec& spec) {
  Json dims = Json::array();
  for (const Dimension& d : spec.dimensions) {
    Json groups = Json::array();
    for (const auto& g : d.groups) groups.push_back(g);
    dims.push_back(Json{{"name", d.name},
                        {"values", d.values},
                        {"groups", std::move(groups)}});
  }
  return Json{{"count", spec.count}, {"dimensions", std::move(dims)}};
}

ItemUniverseSpec universe_spec_from_json(const Json& j) {
  check_keys(j, {"count", "dimensions"}, "item spec");
  ItemUniverseSpec spec;
  spec.count = require(j, "count", "item spec").get<std::int64_t>();
  for (const Json& d : require(j, "dimensions", "item spec")) {
    check_keys(d, {"name", "values", "groups"}, "item spec.dimensions[]");
    Dimension dim;
    dim.name = d.at("name").get<std::string>();
    for (const Json& v : d.at("values"))
      dim.values.push_back(v.get<std::string>());
    if (d.contains("groups"))
      for (const Json& g : d["groups"])
        dim.groups.push_back(g.get<std::vector<int>>());
    spec.dimensions.push_back(std::move(dim));
  }
  return spec;
}

namespace {

Json hierarchy_node_to_json(const Hierarchy& h, int v,
                            const std::vector<std::int64_t>* votes) {
  Json node = Json::object();
  if (votes) node["votes"] = (*votes)[v];
  if (h.is_leaf(v)) {
    node["items"] = h.nodes[v].items;
  } else {
    Json children = Json::array();
    for (int c : h.nodes[v].children)
      children.push_back(hierarchy_node_to_json(h, c, votes));
    node["children"] = std::move(children);
  }
  return node;
}

int hierarchy_node_from_json(const Json& j, Hierarchy& h, int parent,
                             std::vector<std::int64_t>* votes) {
  check_keys(j, {"votes", "items", "children"}, "hierarchy node");
  const int v = static_cast<int>(h.nodes.size());
  h.nodes.push_back({{}, {}, parent});
  if (votes) votes->push_back(j.value("votes", std::int64_t{0}));
  if (j.contains("items")) {
    h.nodes[v].items = j["items"].get<std::vector<ItemId>>();
    std::sort(h.nodes[v].items.begin(), h.nodes[v].items.end());
  }
  if (j.contains("children")) {
    std::vector<ItemId> merged;
    for (const Json& c : j["children"]) {
      const int child = hierarchy_node_from_json(c, h, v, votes);
      h.nodes[v].children.push_back(child);
      merged.insert(merged.end(), h.nodes[child].items.begin(),
                    h.nodes[child].items.end());
    }
    std::sort(merged.begin(), merged.end());
    h.nodes[v].items = std::move(merged);
  }
  return v;
}

}  // namespace

Json to_json(const Hierarchy& h) {
  if (h.empty()) return Json::object();
  return hierarchy_node_to_json(h, 0, nullptr);
}

Hierarchy hierarchy_from_json(const Json& j) {
  Hierarchy h;
  hierarchy_node_from_json(j, h, -1, nullptr);
  h.validate();
  return h;
}

Json to_json(const Clustering& c) {
  Json clusters = Json::array();
  for (const auto& cluster : c.clusters) clusters.push_back(cluster);
  return Json{{"worker", c.worker}, {"clusters", std::move(clusters)}};
}

Clustering clustering_from_json(const Json& j) {
  check_keys(j, {"worker", "clusters"}, "clustering");
  Clustering c;
  c.worker = j.value("worker", WorkerId{0});
  for (const Json& cluster : require(j, "clusters", "clustering")) {
    c.clusters.push_back(cluster.get<std::vector<ItemId>>());
    std::sort(c.clusters.back().begin(), c.clusters.back().end());
  }
  c.validate();
  return c;
}

Json to_json(const ConsensusHierarchy& ch) {
  if (ch.tree.empty()) return Json::object();
  return hierarchy_node_to_json(ch.tree, 0, &ch.votes);
}

ConsensusHierarchy consensus_from_json(const Json& j) {
  ConsensusHierarchy ch;
  hierarchy_node_from_json(j, ch.tree, -1, &ch.votes);
  ch.tree.validate();
  return ch;
}

Json to_json(const CountRunReport& report) {
  Json questions = Json::array();
  for (const CountQuestion& q : report.questions)
    questions.push_back(Json{{"node", q.node},
                             {"answers", q.answers},
                             {"aggregate", q.aggregate}});
  return Json{{"questions", std::move(questions)},
              {"final_frontier", report.final_frontier.nodes},
              {"final_count", report.final_count},
              {"total_tasks", report.total_tasks},
              {"saturated", report.saturated}};
}

namespace {

Json seg_node_to_json(const SegTree& tree, NodeId v) {
  const SegNode& n = tree.nodes[v];
  Json node = Json::object();
  node["id"] = n.id;
  if (n.region.parts.size() == 1) {
    node["rect"] = to_json(n.region.parts.front());
  } else {
    Json parts = Json::array();
    for (const Rect& r : n.region.parts) parts.push_back(to_json(r));
    node["parts"] = std::move(parts);
  }
  if (!n.children.empty()) {
    Json children = Json::array();
    for (NodeId c : n.children) children.push_back(seg_node_to_json(tree, c));
    node["children"] = std::move(children);
  }
  return node;
}

ExplicitNode explicit_node_from_json(const Json& j) {
  check_keys(j, {"id", "rect", "children"}, "tree node");
  ExplicitNode node;
  node.rect = rect_from_json(require(j, "rect", "tree node"));
  if (j.contains("children"))
    for (const Json& c : j["children"])
      node.children.push_back(explicit_node_from_json(c));
  return node;
}

}  // namespace

Json to_json(const SegTree& tree) { return seg_node_to_json(tree, 0); }

SegTree seg_tree_from_json(const Json& j) {
  return build_explicit_tree(explicit_node_from_json(j));
}

Json to_json(const CellPartition& p) {
  Json cells = Json::array();
  for (const Cell& c : p.cells)
    cells.push_back(Json{{"rect", to_json(c.rect)}, {"prior", c.prior}});
  Json adjacency = Json::array();
  for (const auto& [a, b] : p.adjacency)
    adjacency.push_back(Json::array({a, b}));
  return Json{{"cells", std::move(cells)},
              {"adjacency", std::move(adjacency)}};
}

CellPartition cell_partition_from_json(const Json& j) {
  check_keys(j, {"cells", "adjacency"}, "cell partition");
  CellPartition p;
  for (const Json& c : require(j, "cells", "cell partition")) {
    check_keys(c, {"rect", "prior"}, "cell partition.cells[]");
    p.cells.push_back({rect_from_json(c.at("rect")),
                       c.at("prior").get<std::int64_t>()});
  }
  if (j.contains("adjacency"))
    for (const Json& e : j["adjacency"])
      p.adjacency.push_back({e[0].get<int>(), e[1].get<int>()});
  p.validate();
  return p;
}

Json to_json(const KernelPlan& plan) {
  Json batches = Json::array();
  for (const auto& b : plan.batches) batches.push_back(b);
  return Json{{"kernel", plan.kernel}, {"batches", std::move(batches)}};
}

KernelPlan kernel_plan_from_json(const Json& j) {
  check_keys(j, {"kernel", "batches"}, "kernel plan");
  KernelPlan plan;
  if (j.contains("kernel"))
    plan.kernel = j["kernel"].get<std::vector<ItemId>>();
  for (const Json& b : require(j, "batches", "kernel plan"))
    plan.batches.push_back(b.get<std::vector<ItemId>>());
  plan.validate();
  return plan;
}

Json to_json(const ClusterEval& e) {
  return Json{{"pair_recall", e.pair_recall},
              {"pair_precision", e.pair_precision},
              {"pair_accuracy", e.pair_accuracy}};
}

Json to_json(const CostReport& c) {
  return Json{{"counting_tasks", c.counting_tasks},
              {"clustering_tasks", c.clustering_tasks},
              {"categorization_tasks", c.categorization_tasks},
              {"total", c.total()}};
}

std::string to_dot(const ClusteringGraph& g) {
  std::string out = "graph workers {\n";
  for (std::size_t i = 0; i < g.workers.size(); ++i)
    out += "  w" + std::to_string(i) + " [label=\"worker " +
           std::to_string(i) + "\"];\n";
  for (const auto& [a, b] : g.edges)
    out += "  w" + std::to_string(a) + " -- w" + std::to_string(b) + ";\n";
  return out + "}\n";
}

std::string to_dot(const ConsensusHierarchy& ch) {
  std::string out = "digraph consensus {\n  node [shape=box];\n";
  for (std::size_t v = 0; v < ch.tree.nodes.size(); ++v) {
    std::string label = "n=" + std::to_string(ch.tree.nodes[v].items.size()) +
                        " votes=" + std::to_string(ch.votes[v]);
    out += "  v" + std::to_string(v) + " [label=\"" + label + "\"];\n";
  }
  for (std::size_t v = 0; v < ch.tree.nodes.size(); ++v)
    for (int c : ch.tree.nodes[v].children)
      out += "  v" + std::to_string(v) + " -> v" + std::to_string(c) + ";\n";
  return out + "}\n";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_text(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, target);
}

void save_json(const std::string& path, const Json& j) {
  save_text(path, j.dump(2) + "\n");
}

}  // namespace crowdsim
