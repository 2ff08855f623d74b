#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <vector>

namespace crowdsim {

using NodeId = std::uint32_t;
using ItemId = std::uint32_t;
using ObjectId = std::uint32_t;
using WorkerId = std::uint32_t;

/// Axis-aligned rectangle over integer pixel coordinates.
/// Half-open: covers [x0, x1) x [y0, y1).
struct Rect {
  std::int64_t x0 = 0;
  std::int64_t y0 = 0;
  std::int64_t x1 = 0;
  std::int64_t y1 = 0;

  std::int64_t width() const { return x1 - x0; }
  std::int64_t height() const { return y1 - y0; }
  std::int64_t area() const { return width() * height(); }
  bool valid() const { return x1 > x0 && y1 > y0; }

  bool contains(std::int64_t px, std::int64_t py) const {
    return px >= x0 && px < x1 && py >= y0 && py < y1;
  }
  bool contains(const Rect& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// A region is a single rectangle; composite node regions use RegionSet.
using Region = Rect;

inline Rect intersect(const Rect& a, const Rect& b) {
  Rect r{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
         std::min(a.y1, b.y1)};
  if (!r.valid()) return Rect{};  // zero area
  return r;
}

inline std::int64_t intersection_area(const Rect& a, const Rect& b) {
  const std::int64_t w =
      std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const std::int64_t h =
      std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return (w > 0 && h > 0) ? w * h : 0;
}

inline bool disjoint(const Rect& a, const Rect& b) {
  return intersection_area(a, b) == 0;
}

/// Union of disjoint rectangles. Segment-tree nodes use this so that
/// prior-planned groups can cover non-rectangular areas.
struct RegionSet {
  std::vector<Rect> parts;

  RegionSet() = default;
  explicit RegionSet(Rect r) : parts{r} {}
  explicit RegionSet(std::vector<Rect> p) : parts(std::move(p)) {}

  std::int64_t area() const {
    std::int64_t a = 0;
    for (const Rect& r : parts) a += r.area();
    return a;
  }

  bool contains(std::int64_t px, std::int64_t py) const {
    for (const Rect& r : parts)
      if (r.contains(px, py)) return true;
    return false;
  }

  std::int64_t intersection_area(const Rect& r) const {
    std::int64_t a = 0;
    for (const Rect& p : parts) a += crowdsim::intersection_area(p, r);
    return a;
  }

  /// Lexicographically smallest (x, y) corner over all parts.
  std::pair<std::int64_t, std::int64_t> top_left() const {
    std::pair<std::int64_t, std::int64_t> best{INT64_MAX, INT64_MAX};
    for (const Rect& r : parts)
      best = std::min(best, std::make_pair(r.x0, r.y0));
    return best;
  }

  friend bool operator==(const RegionSet&, const RegionSet&) = default;
};

/// r minus cut, as up to four disjoint rectangles.
inline std::vector<Rect> subtract(const Rect& r, const Rect& cut) {
  const Rect c = intersect(r, cut);
  if (!c.valid()) return {r};
  std::vector<Rect> out;
  if (c.y0 > r.y0) out.push_back({r.x0, r.y0, r.x1, c.y0});
  if (c.y1 < r.y1) out.push_back({r.x0, c.y1, r.x1, r.y1});
  if (c.x0 > r.x0) out.push_back({r.x0, c.y0, c.x0, c.y1});
  if (c.x1 < r.x1) out.push_back({c.x1, c.y0, r.x1, c.y1});
  return out;
}

/// True when `parts` is fully covered by `cover`.
inline bool covered_by(const Rect& r, const std::vector<Rect>& cover) {
  std::vector<Rect> remaining{r};
  for (const Rect& c : cover) {
    std::vector<Rect> next;
    for (const Rect& piece : remaining) {
      auto leftover = subtract(piece, c);
      next.insert(next.end(), leftover.begin(), leftover.end());
    }
    remaining = std::move(next);
    if (remaining.empty()) return true;
  }
  return remaining.empty();
}

}  // namespace crowdsim
