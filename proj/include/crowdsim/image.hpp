#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdsim/geometry.hpp"
#include "crowdsim/rng.hpp"

namespace crowdsim {

/// Ground-truth extent of one countable object.
struct ObjectExtent {
  ObjectId id = 0;
  Rect rect;
};

/// Synthetic counting substrate: a pixel grid populated with object extents.
/// Immutable after construction.
struct SyntheticImage {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<ObjectExtent> objects;

  Rect bounds() const { return Rect{0, 0, width, height}; }
  std::int64_t total_objects() const {
    return static_cast<std::int64_t>(objects.size());
  }

  /// Checks dimensions, containment and dense unique ids; throws on failure.
  void validate() const;
};

enum class Layout { uniform, clustered };

struct ImageGenSpec {
  std::int64_t count = 0;
  std::int64_t width = 1000;
  std::int64_t height = 800;
  std::int64_t min_w = 8, min_h = 8;
  std::int64_t max_w = 40, max_h = 40;
  Layout layout = Layout::uniform;
  int clusters = 5;           // clustered layout only
  double spread = 60.0;       // stddev of offsets around a cluster centre
  int attempts_per_object = 200;
};

/// Deterministic image generation; objects never overlap, so a failed
/// placement after the attempt budget raises GenerationError.
SyntheticImage generate_image(const ImageGenSpec& spec, RngSeed seed);

/// Number of objects whose overlap with `region` exceeds half their own
/// area. An object overlapping exactly half is counted iff the region holds
/// the object's top-left pixel, i.e. the half whose corner is
/// lexicographically smallest; this makes a fifty-fifty straight cut assign
/// the object to exactly one side.
std::int64_t true_count(const SyntheticImage& image, const Region& region);
std::int64_t true_count(const SyntheticImage& image, const RegionSet& region);

/// Assigns each listed object to the candidate region with the largest
/// overlap; ties go to the piece with the lexicographically smallest (x, y)
/// corner. Every object maps to exactly one candidate, so counts derived
/// from a split are additive for any fanout. Objects are given as indices
/// into image.objects; returns the chosen candidate per object.
std::vector<std::size_t> assign_majority(
    const SyntheticImage& image, const std::vector<std::size_t>& object_idx,
    const std::vector<RegionSet>& candidates);

}  // namespace crowdsim
