#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vervaat/closed_forms.hpp"
#include "vervaat/quadrature.hpp"
#include "vervaat/samplers.hpp"
#include "vervaat/stats.hpp"
#include "vervaat/thresholds.hpp"

namespace vervaat {
namespace {

constexpr std::uint64_t kSeed = 20231;
constexpr std::size_t kReps = 20000;

double ks_bound(std::size_t n) { return thresholds::kKsQuantile / std::sqrt(static_cast<double>(n)) + 0.01; }

template <class Draw>
std::vector<double> draw_many(std::uint64_t tag, std::size_t reps, Draw draw) {
  std::vector<double> out;
  out.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    RngStream s(kSeed, stream_id_for(tag, i));
    out.push_back(draw(s));
  }
  return out;
}

TEST(Samplers, SameStreamSamePath) {
  for (const auto& [name, p] : process_names()) {
    const double lambda = (p == Process::bm || p == Process::excursion || p == Process::meander ||
                           p == Process::denisov)
                              ? 0.0
                              : -0.7;
    const SamplerSpec spec{p, lambda, 1.0, 64};
    RngStream a(kSeed, 3), b(kSeed, 3);
    const SampledPath x = sample(spec, a), y = sample(spec, b);
    ASSERT_EQ(x.n_steps(), 64u) << name;
    for (std::size_t i = 0; i <= 64; ++i) EXPECT_EQ(x[i], y[i]) << name << " at " << i;
  }
}

TEST(Samplers, EndpointsAreExact) {
  RngStream s(kSeed, 1);
  EXPECT_EQ(sample_bm(32, s)[0], 0.0);
  const SampledPath br = sample_bridge(-1.3, 2.0, 40, s);
  EXPECT_EQ(br[0], 0.0);
  EXPECT_EQ(br[40], -1.3);
  const SampledPath ex = sample_excursion(0.5, 50, s, ExcursionRoute::bessel3);
  EXPECT_EQ(ex[0], 0.0);
  EXPECT_EQ(ex[50], 0.0);
  const SampledPath fp = sample_fpb(-0.8, 1.0, 50, s);
  EXPECT_EQ(fp[0], 0.0);
  EXPECT_DOUBLE_EQ(fp[50], -0.8);
  for (std::size_t i = 0; i < 50; ++i) EXPECT_GT(fp[i], -0.8);
  const SampledPath de = sample_drifting_excursion(-1.0, 64, s);
  EXPECT_EQ(de[0], 0.0);
  EXPECT_EQ(de[64], -1.0);
}

TEST(Samplers, BridgeMarginalVariance) {
  const auto x = draw_many(1, kReps, [](RngStream& s) { return sample_bridge(0.4, 1.0, 32, s)[8]; });
  EXPECT_LT(ks_one_sample(x, [](double y) { return normal_cdf((y - 0.1) / std::sqrt(0.25 * 0.75)); }), ks_bound(kReps));
}

TEST(Samplers, ExcursionRoutesMatchMarginalLaw) {
  for (ExcursionRoute route : {ExcursionRoute::vervaat, ExcursionRoute::bessel3}) {
    // the direct route is biased by the grid minimum; a fine grid keeps it under the bound
    const std::size_t n = route == ExcursionRoute::vervaat ? 4096 : 16;
    const auto x = draw_many(2, 4000, [&](RngStream& s) { return sample_excursion(1.0, n, s, route)[n / 2]; });
    EXPECT_LT(ks_one_sample(x, [](double r) { return excursion_marginal_cdf(0.5, r); }), ks_bound(4000));
  }
}

TEST(Samplers, FirstPassageMarginalMatchesBessel3Quadrature) {
  const double lambda = -1.2;
  const TabulatedCdf law([&](double r) { return bessel3_bridge_marginal(-lambda, 0.0, 1.0, 0.5, r); }, 0.0, 8.0);
  EXPECT_NEAR(law.mass(), 1.0, 1e-8);
  const auto x = draw_many(3, kReps, [&](RngStream& s) { return sample_fpb(lambda, 1.0, 16, s)[8] - lambda; });
  EXPECT_LT(ks_one_sample(x, law), ks_bound(kReps));
}

TEST(Samplers, MeanderMoments) {
  Moments mean, m2, mid;
  for (std::size_t i = 0; i < kReps; ++i) {
    RngStream s(kSeed, stream_id_for(4, i));
    const SampledPath m = sample_meander(16, s);
    mean.add(m[16]);
    m2.add(m[16] * m[16]);
    mid.add(m[8]);
  }
  EXPECT_LT(z_score(mean, std::sqrt(std::numbers::pi / 2.0)), 4.0);
  EXPECT_LT(z_score(m2, 2.0), 4.0);
  EXPECT_LT(z_score(mid, meander_mean(0.5)), 4.0);
}

TEST(Samplers, DecomposedSplicesAtZero) {
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream s(kSeed, stream_id_for(5, i));
    auto [v, rec] = sample_vervaat_bridge_decomposed(-1.0, 128, s);
    const std::size_t m = rec.split.value;
    ASSERT_GE(m, 2u);
    ASSERT_LE(m, 127u);
    EXPECT_EQ(v[m], 0.0);
    EXPECT_DOUBLE_EQ(rec.z_grid, static_cast<double>(m) / 128.0);
    EXPECT_LE(rec.z, rec.z_grid);
    for (std::size_t j = 0; j <= m; ++j) EXPECT_GE(v[j], 0.0);
    for (std::size_t j = m + 1; j < 128; ++j) EXPECT_GT(v[j], -1.0);
    EXPECT_DOUBLE_EQ(v[128], -1.0);
  }
}

TEST(Samplers, DirectVervaatStartsAtMinimum) {
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream s(kSeed, stream_id_for(6, i));
    const SampledPath v = sample_vervaat_bridge_direct(-0.5, 64, s);
    EXPECT_EQ(v[0], 0.0);
    EXPECT_NEAR(v[64], -0.5, 1e-12);
    for (std::size_t j = 1; j < 64; ++j) EXPECT_GE(v[j], -0.5 - 1e-12);
  }
}

TEST(Samplers, FirstReturnOfDecomposedIsExactLaw) {
  const auto z = draw_many(7, kReps, [](RngStream& s) { return sample_vervaat_bridge_decomposed(-1.0, 8, s).second.z; });
  EXPECT_LT(ks_one_sample(z, [](double t) { return cdf_Z(-1.0, t); }), ks_bound(kReps));
}

TEST(Samplers, DenisovPiecesSitAboveTheirEnds) {
  // V(B) >= 0 before the split and >= V(B)_1 after it
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream s(kSeed, stream_id_for(8, i));
    auto [v, k] = sample_meander_pair_denisov(100, s);
    EXPECT_EQ(v[0], 0.0);
    for (std::size_t j = 1; j <= k.value; ++j) EXPECT_GT(v[j], 0.0);
    for (std::size_t j = k.value; j < 100; ++j) EXPECT_GE(v[j], v[100]);
    EXPECT_GE(k.value, 1u);
    EXPECT_LE(k.value, 99u);
  }
}

TEST(Samplers, DenisovTerminalVarianceIsOne) {
  Moments m2;
  for (std::size_t i = 0; i < kReps; ++i) {
    RngStream s(kSeed, stream_id_for(9, i));
    const double x = sample_meander_pair_denisov(1000, s).first[1000];
    m2.add(x * x);
  }
  // a rotation keeps the sum of increments, so V(B)_1 = B_1; coarse grids bias the arcsine split
  EXPECT_LT(z_score(m2, 1.0), 4.0);
}

TEST(Samplers, DispatchRejectsBadArguments) {
  RngStream s(kSeed, 0);
  EXPECT_THROW(sample({Process::bm, 0.0, 1.0, 1}, s), std::invalid_argument);
  EXPECT_THROW(sample({Process::bm, 0.0, 0.0, 8}, s), std::invalid_argument);
  EXPECT_THROW(sample({Process::vervaat_direct, -1.0, 2.0, 8}, s), std::invalid_argument);
  EXPECT_THROW(sample({Process::fpb, 0.5, 1.0, 8}, s), std::invalid_argument);
  EXPECT_THROW(parse_process("levy"), std::invalid_argument);
}

}  // namespace
}  // namespace vervaat
