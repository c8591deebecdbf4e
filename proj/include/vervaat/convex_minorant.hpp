#ifndef VERVAAT_CONVEX_MINORANT_HPP_
#define VERVAAT_CONVEX_MINORANT_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "vervaat/path.hpp"
#include "vervaat/stats.hpp"

namespace vervaat {

/*
 * Lower convex hull of the grid points (t_i, path[i]).
 * vertices: increasing grid indices, first 0 and last N.
 * slopes: one per segment, strictly increasing.
 */
struct MinorantResult {
  std::vector<std::size_t> vertices;
  std::vector<double> slopes;

  std::size_t segment_count() const { return slopes.size(); }
};

/// Monotone chain scan; collinear points are dropped, so slopes strictly increase.
inline MinorantResult convex_minorant(const SampledPath& path) {
  const std::size_t n = path.n_steps();
  std::vector<std::size_t> hull;
  hull.reserve(64);
  // cross > 0 iff (a, b, c) turns left, i.e. b lies strictly below the chord a-c
  auto cross = [&](std::size_t a, std::size_t b, std::size_t c) {
    const double x1 = static_cast<double>(b - a), y1 = path[b] - path[a];
    const double x2 = static_cast<double>(c - a), y2 = path[c] - path[a];
    return x1 * y2 - y1 * x2;
  };
  for (std::size_t i = 0; i <= n; ++i) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0.0) hull.pop_back();
    hull.push_back(i);
  }
  MinorantResult r;
  r.vertices = std::move(hull);
  r.slopes.reserve(r.vertices.size() - 1);
  for (std::size_t k = 1; k < r.vertices.size(); ++k) {
    const std::size_t a = r.vertices[k - 1], b = r.vertices[k];
    r.slopes.push_back((path[b] - path[a]) / (path.time(b) - path.time(a)));
  }
  return r;
}

/// Minorant value at grid index i.
inline double minorant_value(const SampledPath& path, const MinorantResult& m, std::size_t i) {
  std::size_t k = 1;
  while (k + 1 < m.vertices.size() && m.vertices[k] < i) ++k;
  const std::size_t a = m.vertices[k - 1];
  return path[a] + m.slopes[k - 1] * (path.time(i) - path.time(a));
}

inline double last_segment_slope(const SampledPath& path) { return convex_minorant(path).slopes.back(); }

struct SegmentCountStats {
  std::map<std::size_t, std::size_t> histogram;  // segment count -> number of paths
  Moments moments;
};

inline SegmentCountStats segment_count_stats(std::span<const std::size_t> counts) {
  if (counts.empty()) throw std::invalid_argument("segment statistics need a nonempty ensemble");
  SegmentCountStats s;
  for (std::size_t c : counts) {
    ++s.histogram[c];
    s.moments.add(static_cast<double>(c));
  }
  return s;
}

inline SegmentCountStats segment_count_stats(std::span<const SampledPath> paths) {
  std::vector<std::size_t> counts;
  counts.reserve(paths.size());
  for (const auto& p : paths) counts.push_back(convex_minorant(p).segment_count());
  return segment_count_stats(counts);
}

}  // namespace vervaat

#endif  // VERVAAT_CONVEX_MINORANT_HPP_
