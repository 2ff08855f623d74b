#pragma once

#include <string>

#include <json.hpp>

#include "crowdsim/consensus.hpp"
#include "crowdsim/counting.hpp"
#include "crowdsim/image.hpp"
#include "crowdsim/items.hpp"
#include "crowdsim/prior.hpp"
#include "crowdsim/worker.hpp"

namespace crowdsim {

using Json = nlohmann::ordered_json;

// Serialization is stable: fixed key order, no timestamps, so re-running a
// configuration reproduces every report byte for byte.

Json to_json(const Rect& r);
Rect rect_from_json(const Json& j);

Json to_json(const SyntheticImage& img);
SyntheticImage image_from_json(const Json& j);

Json to_json(const ImageGenSpec& spec);
ImageGenSpec image_spec_from_json(const Json& j);

Json to_json(const std::vector<Item>& items);
std::vector<Item> items_from_json(const Json& j);

Json to_json(const ItemUniverseSpec& spec);
ItemUniverseSpec universe_spec_from_json(const Json& j);

Json to_json(const Hierarchy& h);
Hierarchy hierarchy_from_json(const Json& j);

Json to_json(const Clustering& c);
Clustering clustering_from_json(const Json& j);

Json to_json(const ConsensusHierarchy& ch);
ConsensusHierarchy consensus_from_json(const Json& j);

Json to_json(const CountRunReport& report);

Json to_json(const SegTree& tree);
/// Reads a nested explicit tree: {"rect":[x0,y0,x1,y1],"children":[...]}.
SegTree seg_tree_from_json(const Json& j);

Json to_json(const CellPartition& p);
CellPartition cell_partition_from_json(const Json& j);

Json to_json(const KernelPlan& plan);
KernelPlan kernel_plan_from_json(const Json& j);

Json to_json(const ClusterEval& e);
Json to_json(const CostReport& c);

std::string to_dot(const ClusteringGraph& g);
std::string to_dot(const ConsensusHierarchy& ch);

/// Rejects keys outside `allowed`; `where` names the object in the error.
void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where);

Json load_json(const std::string& path);
/// Writes via a temporary file and rename, so readers never see a partial
/// file and failed runs do not clobber existing outputs.
void save_text(const std::string& path, const std::string& text);
void save_json(const std::string& path, const Json& j);

}  // namespace crowdsim
