#pragma once

#include <string>
#include <vector>

#include "crowdsim/geometry.hpp"

namespace crowdsim {

/// An item to be clustered. Features are opaque tags consumed only by the
/// ground truth and by worker simulation.
struct Item {
  ItemId id = 0;
  std::vector<std::string> features;
};

/// One categorical dimension of an item universe (e.g. shape, color).
/// `groups` optionally partitions the value indices into coarse classes,
/// giving that dimension's hierarchy a middle level.
struct Dimension {
  std::string name;
  std::vector<std::string> values;
  std::vector<std::vector<int>> groups;
};

/// Describes a generated item universe whose dimensions induce the
/// ground-truth concept hierarchies.
struct ItemUniverseSpec {
  std::int64_t count = 0;
  std::vector<Dimension> dimensions;
};

/// Items with feature tags assigned by cycling through the cross product of
/// dimension values, so every value combination appears evenly.
std::vector<Item> generate_items(const ItemUniverseSpec& spec);

/// Value index of `item` along dimension `dim` of the spec.
int item_value(const ItemUniverseSpec& spec, const Item& item, std::size_t dim);

}  // namespace crowdsim
