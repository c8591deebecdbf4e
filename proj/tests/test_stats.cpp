#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "vervaat/rng.hpp"
#include "vervaat/stats.hpp"

namespace vervaat {
namespace {

std::vector<double> uniforms(std::uint64_t seed, std::size_t n) {
  RngStream s(seed, 0);
  std::vector<double> u(n);
  for (double& x : u) x = s.uniform();
  return u;
}

TEST(Ks, KolmogorovSurvivalReferencePoints) {
  EXPECT_NEAR(kolmogorov_survival(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(kolmogorov_survival(1.95), 0.0010, 1e-4);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Ks, CalibrationOfTheScaledQuantile) {
  // under the null, sqrt(n) D exceeds 1.95 about 0.1% of the time
  int exceed = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto u = uniforms(seed, 2000);
    if (std::sqrt(2000.0) * ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); }) > 1.95) ++exceed;
  }
  EXPECT_LE(exceed, 4);
}

TEST(Ks, DetectsAShift) {
  auto u = uniforms(1, 5000);
  for (double& x : u) x = 0.9 * x;
  EXPECT_GT(ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.09);
}

TEST(Ks, ConstantSampleAgainstContinuousLaw) {
  const std::vector<double> c(200, 0.5);
  EXPECT_GE(ks_one_sample(c, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5);
}

TEST(Ks, AtomNeedsTheLeftLimit) {
  // law: atom 1/2 at 0, uniform on (0, 1] otherwise
  std::vector<double> x;
  RngStream s(5, 0);
  for (int i = 0; i < 4000; ++i) x.push_back(s.uniform() < 0.5 ? 0.0 : s.uniform());
  auto cdf = [](double y) { return y < 0.0 ? 0.0 : std::min(1.0, 0.5 + 0.5 * y); };
  auto left = [](double y) { return y <= 0.0 ? 0.0 : std::min(1.0, 0.5 + 0.5 * y); };
  EXPECT_LT(ks_one_sample(x, cdf, left), 0.04);
}

TEST(Ks, RejectsSmallSamples) {
  const std::vector<double> x(10, 0.1);
  EXPECT_THROW(ks_one_sample(x, [](double y) { return y; }), std::invalid_argument);
}

TEST(Ks, TwoSampleIdenticalIsZero) {
  const auto a = uniforms(3, 500);
  EXPECT_DOUBLE_EQ(ks_two_sample(a, a), 0.0);
  const auto b = uniforms(4, 500);
  EXPECT_LT(ks_two_sample(a, b), 1.95 * std::sqrt(2.0 / 500.0));
}

TEST(Ks, LatticeSampleAgainstItsOwnLaw) {
  // index = ceil(U * 8) for U uniform: P(index <= k) = k / 8
  std::vector<std::size_t> idx;
  RngStream s(6, 0);
  for (int i = 0; i < 4000; ++i) idx.push_back(static_cast<std::size_t>(std::ceil(s.uniform() * 8.0)));
  const double d = ks_lattice(idx, 8, [](std::size_t k) { return static_cast<double>(k) / 8.0; });
  EXPECT_LT(d, 1.95 / std::sqrt(4000.0));
  // one cell of shift is seen in full
  const double shifted = ks_lattice(idx, 8, [](std::size_t k) { return std::min(1.0, (k + 1.0) / 8.0); });
  EXPECT_NEAR(shifted, 0.125, 0.02);
  const std::vector<std::size_t> outside(200, 9);
  EXPECT_THROW(ks_lattice(outside, 8, [](std::size_t) { return 1.0; }), std::invalid_argument);
}

TEST(Moments, WelfordAgreesWithTwoPass) {
  const std::vector<double> x{1.0, 4.0, 4.0, 5.0, 11.0};
  Moments m;
  for (double v : x) m.add(v);
  EXPECT_DOUBLE_EQ(m.mean(), 5.0);
  EXPECT_DOUBLE_EQ(m.variance(), 13.5);
  Moments a, b;
  for (std::size_t i = 0; i < 2; ++i) a.add(x[i]);
  for (std::size_t i = 2; i < x.size(); ++i) b.add(x[i]);
  a.merge(b);
  EXPECT_NEAR(a.mean(), 5.0, 1e-14);
  EXPECT_NEAR(a.variance(), 13.5, 1e-12);
}

TEST(Moments, ZScoreWithZeroSpread) {
  Moments m;
  m.add(2.0);
  m.add(2.0);
  EXPECT_EQ(z_score(m, 2.0), 0.0);
  EXPECT_TRUE(std::isinf(z_score(m, 3.0)));
}

TEST(Regression, ThroughOriginRecoversSlope) {
  const std::vector<double> x{0.3, 0.5, 0.7, 0.9}, y{0.6, 1.0, 1.4, 1.8};
  const OriginFit f = fit_through_origin(x, y);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
}

TEST(Correlation, PerfectAndNone) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{1, -1, -1, 1};
  EXPECT_NEAR(pearson_correlation(x, y), 1.0, 1e-14);
  EXPECT_NEAR(pearson_correlation(x, z), 0.0, 1e-14);
}

TEST(ChiSquare, FairCounts) {
  const std::vector<double> obs{25, 25, 25, 25}, p{0.25, 0.25, 0.25, 0.25};
  const ChiSquare c = chi_square(obs, p);
  EXPECT_DOUBLE_EQ(c.statistic, 0.0);
  EXPECT_EQ(c.dof, 3);
  EXPECT_NEAR(c.p_value, 1.0, 1e-12);
}

}  // namespace
}  // namespace vervaat
