#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "vervaat/convex_minorant.hpp"
#include "vervaat/samplers.hpp"

namespace vervaat {
namespace {

SampledPath path_of(std::vector<double> v) { return SampledPath(1.0, std::move(v)); }

TEST(ConvexMinorant, StraightLineIsOneSegment) {
  const auto m = convex_minorant(path_of({0.0, -0.25, -0.5, -0.75, -1.0}));
  EXPECT_EQ(m.segment_count(), 1u);
  EXPECT_EQ(m.vertices, (std::vector<std::size_t>{0, 4}));
  EXPECT_DOUBLE_EQ(m.slopes[0], -1.0);
}

TEST(ConvexMinorant, VShape) {
  const auto m = convex_minorant(path_of({0.0, -1.0, 0.0}));
  EXPECT_EQ(m.vertices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(m.slopes[0], -2.0);
  EXPECT_DOUBLE_EQ(m.slopes[1], 2.0);
}

TEST(ConvexMinorant, CollinearInteriorPointsAreDropped) {
  const auto m = convex_minorant(path_of({0.0, -1.0, -2.0, -1.0, 5.0}));
  EXPECT_EQ(m.vertices, (std::vector<std::size_t>{0, 2, 3, 4}));
}

TEST(ConvexMinorant, PropertiesOnRandomPaths) {
  for (std::size_t r = 0; r < 300; ++r) {
    RngStream s(99, r);
    const SampledPath p = sample_bridge(-0.8, 1.0, 257, s);
    const auto m = convex_minorant(p);
    ASSERT_EQ(m.vertices.front(), 0u);
    ASSERT_EQ(m.vertices.back(), 257u);
    ASSERT_EQ(m.slopes.size() + 1, m.vertices.size());
    for (std::size_t k = 1; k < m.slopes.size(); ++k) EXPECT_LT(m.slopes[k - 1], m.slopes[k]);
    for (std::size_t i = 0; i <= 257; ++i) EXPECT_LE(minorant_value(p, m, i), p[i] + 1e-12);
    for (std::size_t v : m.vertices) EXPECT_NEAR(minorant_value(p, m, v), p[v], 1e-12);
  }
}

TEST(ConvexMinorant, VervaatBridgeLastSlopeIsAtLeastLambda) {
  // V(B) ends at lambda and starts at its minimum 0, so the last slope is >= lambda
  for (std::size_t r = 0; r < 300; ++r) {
    RngStream s(98, r);
    const SampledPath v = sample_vervaat_bridge_direct(-1.0, 512, s);
    EXPECT_GE(last_segment_slope(v), -1.0 - 1e-12);
  }
}

TEST(ConvexMinorant, SegmentCountStats) {
  const std::vector<std::size_t> counts{1, 1, 2, 3, 3, 3};
  const SegmentCountStats s = segment_count_stats(counts);
  EXPECT_EQ(s.histogram.at(1), 2u);
  EXPECT_EQ(s.histogram.at(3), 3u);
  EXPECT_DOUBLE_EQ(s.moments.mean(), 13.0 / 6.0);
  EXPECT_THROW(segment_count_stats(std::vector<std::size_t>{}), std::invalid_argument);
}

}  // namespace
}  // namespace vervaat
