#include "crowdsim/image.hpp"

#include <cmath>
#include <unordered_set>

#include "crowdsim/errors.hpp"

namespace crowdsim {

void SyntheticImage::validate() const {
  if (width <= 0 || height <= 0) throw StructureError("image has no area");
  std::unordered_set<ObjectId> seen;
  for (const ObjectExtent& o : objects) {
    if (!o.rect.valid()) throw StructureError("object extent has no area");
    if (!bounds().contains(o.rect))
      throw BoundsError("object extent escapes the image");
    if (!seen.insert(o.id).second)
      throw StructureError("duplicate object id");
  }
  for (ObjectId id = 0; id < objects.size(); ++id)
    if (!seen.count(id)) throw StructureError("object ids are not dense");
}

namespace {

bool counted_in(const ObjectExtent& obj, const RegionSet& region) {
  const std::int64_t inter = [&] {
    std::int64_t a = 0;
    for (const Rect& p : region.parts) a += intersection_area(p, obj.rect);
    return a;
  }();
  const std::int64_t full = obj.rect.area();
  if (2 * inter > full) return true;
  if (2 * inter == full && inter > 0)
    return region.contains(obj.rect.x0, obj.rect.y0);
  return false;
}

}  // namespace

std::int64_t true_count(const SyntheticImage& image, const Region& region) {
  if (!region.valid()) throw BoundsError("query region has no area");
  if (!image.bounds().contains(region))
    throw BoundsError("query region outside image bounds");
  return true_count(image, RegionSet{region});
}

std::int64_t true_count(const SyntheticImage& image, const RegionSet& region) {
  for (const Rect& p : region.parts) {
    if (!p.valid()) throw BoundsError("query region has an empty part");
    if (!image.bounds().contains(p))
      throw BoundsError("query region outside image bounds");
  }
  std::int64_t n = 0;
  for (const ObjectExtent& o : image.objects)
    if (counted_in(o, region)) ++n;
  return n;
}

std::vector<std::size_t> assign_majority(
    const SyntheticImage& image, const std::vector<std::size_t>& object_idx,
    const std::vector<RegionSet>& candidates) {
  std::vector<std::size_t> out(object_idx.size());
  for (std::size_t i = 0; i < object_idx.size(); ++i) {
    const Rect& obj = image.objects.at(object_idx[i]).rect;
    std::int64_t best_area = -1;
    std::pair<std::int64_t, std::int64_t> best_corner{INT64_MAX, INT64_MAX};
    std::size_t best = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::int64_t inter = 0;
      std::pair<std::int64_t, std::int64_t> corner{INT64_MAX, INT64_MAX};
      for (const Rect& p : candidates[c].parts) {
        const Rect piece = intersect(p, obj);
        if (!piece.valid()) continue;
        inter += piece.area();
        corner = std::min(corner, std::make_pair(piece.x0, piece.y0));
      }
      if (inter > best_area ||
          (inter == best_area && inter > 0 && corner < best_corner)) {
        best_area = inter;
        best_corner = corner;
        best = c;
      }
    }
    out[i] = best;
  }
  return out;
}

namespace {

Rect place_uniform(Rng& rng, const ImageGenSpec& spec, std::int64_t w,
                   std::int64_t h) {
  const std::int64_t x = rng.uniform_int(0, spec.width - w);
  const std::int64_t y = rng.uniform_int(0, spec.height - h);
  return Rect{x, y, x + w, y + h};
}

Rect place_clustered(Rng& rng, const ImageGenSpec& spec,
                     const std::vector<std::pair<double, double>>& centres,
                     std::int64_t w, std::int64_t h) {
  const auto& c = centres[rng.pick(centres.size())];
  auto clamp = [](std::int64_t v, std::int64_t lo, std::int64_t hi) {
    return std::max(lo, std::min(hi, v));
  };
  const std::int64_t x =
      clamp(static_cast<std::int64_t>(std::llround(c.first + rng.gaussian() * spec.spread)),
            0, spec.width - w);
  const std::int64_t y =
      clamp(static_cast<std::int64_t>(std::llround(c.second + rng.gaussian() * spec.spread)),
            0, spec.height - h);
  return Rect{x, y, x + w, y + h};
}

}  // namespace

SyntheticImage generate_image(const ImageGenSpec& spec, RngSeed seed) {
  if (spec.width <= 0 || spec.height <= 0)
    throw ConfigError("image dimensions must be positive");
  if (spec.count < 0) throw ConfigError("object count must be nonnegative");
  if (spec.min_w <= 0 || spec.min_h <= 0 || spec.max_w < spec.min_w ||
      spec.max_h < spec.min_h)
    throw ConfigError("bad object size range");
  if (spec.max_w > spec.width || spec.max_h > spec.height)
    throw ConfigError("objects larger than the image");

  Rng rng(seed);
  std::vector<std::pair<double, double>> centres;
  if (spec.layout == Layout::clustered) {
    const int n = std::max(1, spec.clusters);
    centres.reserve(n);
    for (int i = 0; i < n; ++i)
      centres.emplace_back(rng.uniform() * spec.width,
                           rng.uniform() * spec.height);
  }

  SyntheticImage img;
  img.width = spec.width;
  img.height = spec.height;
  img.objects.reserve(spec.count);

  for (std::int64_t i = 0; i < spec.count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.attempts_per_object; ++attempt) {
      const std::int64_t w = rng.uniform_int(spec.min_w, spec.max_w);
      const std::int64_t h = rng.uniform_int(spec.min_h, spec.max_h);
      const Rect r = spec.layout == Layout::uniform
                         ? place_uniform(rng, spec, w, h)
                         : place_clustered(rng, spec, centres, w, h);
      bool overlaps = false;
      for (const ObjectExtent& o : img.objects)
        if (!disjoint(o.rect, r)) {
          overlaps = true;
          break;
        }
      if (!overlaps) {
        img.objects.push_back({static_cast<ObjectId>(i), r});
        placed = true;
        break;
      }
    }
    if (!placed)
      throw GenerationError("could not pack " + std::to_string(spec.count) +
                            " objects after the retry budget");
  }
  return img;
}

}  // namespace crowdsim
