#include "crowdsim/items.hpp"

#include "crowdsim/errors.hpp"

namespace crowdsim {

std::vector<Item> generate_items(const ItemUniverseSpec& spec) {
  if (spec.count < 0) throw ConfigError("item count must be nonnegative");
  for (const Dimension& d : spec.dimensions)
    if (d.values.empty())
      throw ConfigError("dimension '" + d.name + "' has no values");

  std::vector<Item> items;
  items.reserve(spec.count);
  for (std::int64_t i = 0; i < spec.count; ++i) {
    Item it;
    it.id = static_cast<ItemId>(i);
    std::int64_t stride = 1;
    for (const Dimension& d : spec.dimensions) {
      const int v = static_cast<int>((i / stride) % d.values.size());
      it.features.push_back(d.name + ":" + d.values[v]);
      stride *= static_cast<std::int64_t>(d.values.size());
    }
    items.push_back(std::move(it));
  }
  return items;
}

int item_value(const ItemUniverseSpec& spec, const Item& item,
               std::size_t dim) {
  if (dim >= spec.dimensions.size()) throw BoundsError("no such dimension");
  const Dimension& d = spec.dimensions[dim];
  const std::string& tag = item.features.at(dim);
  const std::string prefix = d.name + ":";
  for (std::size_t v = 0; v < d.values.size(); ++v)
    if (tag == prefix + d.values[v]) return static_cast<int>(v);
  throw DomainMismatchError("item feature '" + tag +
                            "' not in dimension '" + d.name + "'");
}

}  // namespace crowdsim
