#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "vervaat/closed_forms.hpp"

namespace vervaat {
namespace {

// Reference values computed once with 50-digit mpmath evaluation.
constexpr double kFz = 0.967882898076573;         // f_Z(-1, 0.5)
constexpr double kAboveDrift = 0.344320457581202;  // prob_above_drift(-1)
constexpr double kSlope = 0.672160228790601;       // slope cdf, lambda -1, a -0.5
constexpr double kMeanVB = 0.660989212585294;      // mean_VB(0.5)
constexpr double kM2VB = 0.863380227632419;        // second_moment_VB(0.5)
constexpr double kFA = 1.169817934336447;          // f_A(-1, 0.25)
// unnormalized masses of the two non-Markov shapes, t0 = 0.5, x0 = 1, lambda = -1
constexpr double kNonMarkovMass1 = 0.259708997441054;
constexpr double kNonMarkovMass2 = 0.194781748080790;

TEST(Kernels, GaussianDiagonal) {
  EXPECT_DOUBLE_EQ(kernel_p(0.7, 1.3, 1.3), 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.7));
  EXPECT_DOUBLE_EQ(kernel_p(0.7, 1.3, -0.2), kernel_p(0.7, -0.2, 1.3));
}

TEST(Kernels, QTildeAtOrigin) {
  for (double t : {0.1, 0.5, 2.0})
    EXPECT_NEAR(kernel_q_tilde(t, 0.0, 0.0), 2.0 / std::sqrt(2.0 * std::numbers::pi * t * t * t), 1e-14);
}

TEST(Kernels, QTildeFirstHittingIdentity) {
  for (double t : {0.05, 0.3, 1.0, 4.0})
    for (double y : {0.01, 0.2, 1.0, 3.0, 7.0})
      EXPECT_NEAR(kernel_q_tilde(t, 0.0, y), 2.0 / y * kernel_g(t, y), 1e-12 * kernel_q_tilde(t, 0.0, y));
}

TEST(Kernels, QTildeSeriesBranchIsContinuous) {
  const double below = kernel_q_tilde(1.0, 0.03, 0.0333);
  const double above = kernel_q_tilde(1.0, 0.03, 0.0334);
  EXPECT_NEAR(below, above, 1e-5);
}

TEST(Kernels, Bessel3TransitionNormalized) {
  for (double x : {0.0, 0.5, 2.0}) {
    const auto r = integrate_to_infinity([x](double y) { return kernel_q_tilde(0.8, x, y) * y * y; }, 0.0);
    EXPECT_NEAR(r.value, 1.0, 1e-8) << x;
  }
}

TEST(FirstReturn, ReferenceValue) { EXPECT_NEAR(f_Z(-1.0, 0.5), kFz, 1e-14); }

TEST(FirstReturn, NormalizedAndCdfConsistent) {
  for (double l : {-0.3, -1.0, -2.5}) {
    EXPECT_NEAR(integrate([l](double t) { return f_Z(l, t); }, 0.0, 1.0).value, 1.0, 1e-10);
    for (double t : {0.1, 0.4, 0.8})
      EXPECT_NEAR(integrate([l](double s) { return f_Z(l, s); }, 0.0, t).value, cdf_Z(l, t), 1e-10);
  }
  EXPECT_EQ(f_Z(-1.0, 0.0), 0.0);
  EXPECT_EQ(f_Z(-1.0, 1.0), 0.0);
}

TEST(FirstReturn, MirrorLaw) {
  EXPECT_NEAR(f_Zhat(1.0, 0.5), kFz, 1e-14);
  for (double t : {0.1, 0.6, 0.95}) EXPECT_EQ(f_Zhat(2.0, t), f_Z(-2.0, 1.0 - t));
  EXPECT_NEAR(integrate_singular([](double t) { return f_Zhat(0.7, t); }, 0.0, 1.0).value, 1.0, 1e-10);
}

TEST(HelperLaw, ReferenceValueAndSecondScheme) {
  EXPECT_NEAR(f_A(-1.0, 0.25), kFA, 1e-10);
  boost::math::quadrature::tanh_sinh<double> oracle;
  const double second = oracle.integrate([](double t) { return f_Z(-1.0, t) / t; }, 0.25, 1.0);
  EXPECT_NEAR(f_A(-1.0, 0.25), second, 1e-8);
}

TEST(HelperLaw, NormalizedDecreasingAndCdf) {
  EXPECT_NEAR(integrate([](double a) { return f_A(-1.0, a); }, 0.0, 1.0, 1e-12, 1e-10).value, 1.0, 1e-8);
  double prev = f_A(-1.0, 0.01);
  for (double a = 0.05; a < 1.0; a += 0.05) {
    const double cur = f_A(-1.0, a);
    EXPECT_LT(cur, prev);
    prev = cur;
  }
  EXPECT_NEAR(f_A(-1.0, 1.0 - 1e-9), 0.0, 1e-9);
  EXPECT_NEAR(cdf_A(-1.0, 0.3), integrate([](double a) { return f_A(-1.0, a); }, 0.0, 0.3).value, 1e-9);
  EXPECT_EQ(cdf_A(0.0, 0.3), 0.3);
}

TEST(AboveDrift, ReferenceValueAndMeanIdentity) {
  EXPECT_NEAR(prob_above_drift(-1.0), kAboveDrift, 1e-13);
  for (double l : {-0.2, -1.0, -3.0}) {
    const double mean = integrate([l](double t) { return t * f_Z(l, t); }, 0.0, 1.0).value;
    EXPECT_NEAR(prob_above_drift(l), mean, 1e-8) << l;
  }
  EXPECT_GT(prob_above_drift(-1e-6), 0.999);
}

TEST(AboveDrift, ConditionedLawNormalized) {
  EXPECT_NEAR(integrate([](double t) { return f_Z_conditioned(-1.0, t); }, 0.0, 1.0).value, 1.0, 1e-8);
  EXPECT_NEAR(cdf_Z_conditioned(-1.0, 0.999999), 1.0, 1e-6);
}

TEST(SlopeLaw, BoundaryValuesAndReference) {
  EXPECT_EQ(slope_last_segment_cdf(-1.0, 0.0), 1.0);
  EXPECT_NEAR(slope_last_segment_cdf(-1.0, -1.0), prob_above_drift(-1.0), 1e-15);
  EXPECT_NEAR(slope_last_segment_cdf(-1.0, -0.5), kSlope, 1e-13);
  EXPECT_LT(slope_last_segment_cdf(-1.0, -0.7), slope_last_segment_cdf(-1.0, -0.6));
  EXPECT_THROW(slope_last_segment_cdf(-1.0, 0.1), std::domain_error);
  EXPECT_THROW(slope_last_segment_cdf(-1.0, -1.5), std::domain_error);
}

TEST(VervaatMoments, ReferenceValuesAndBoundaries) {
  EXPECT_NEAR(mean_VB(0.5), kMeanVB, 1e-14);
  EXPECT_NEAR(second_moment_VB(0.5), kM2VB, 1e-14);
  EXPECT_EQ(mean_VB(0.0), 0.0);
  EXPECT_NEAR(mean_VB(1.0), 0.0, 1e-15);
  EXPECT_EQ(second_moment_VB(0.0), 0.0);
  EXPECT_NEAR(second_moment_VB(1.0), 1.0, 1e-15);
  for (double t : {0.1, 0.3, 0.45}) EXPECT_NEAR(mean_VB(t), mean_VB(1.0 - t), 1e-15);
}

TEST(MeanderMoments, Boundaries) {
  EXPECT_EQ(meander_mean(0.0), 0.0);
  EXPECT_EQ(meander_m2(0.0), 0.0);
  EXPECT_EQ(meander_cross(0.0), 0.0);
  EXPECT_EQ(meander_m2(1.0), 2.0);
  EXPECT_EQ(meander_cross(1.0), 2.0);
  EXPECT_NEAR(meander_mean(1.0), std::sqrt(std::numbers::pi / 2.0), 1e-15);
  EXPECT_NEAR(meander_cross(0.5), 1.414213562373095, 1e-14);
}

TEST(MeanderMarginal, RayleighAtEndAndNormalized) {
  for (double x : {0.1, 1.0, 2.5}) EXPECT_NEAR(meander_marginal(1.0 - 1e-12, x), rayleigh_density(x), 1e-6);
  for (double t : {0.25, 0.5, 0.75}) {
    EXPECT_NEAR(integrate_to_infinity([t](double x) { return meander_marginal(t, x); }, 0.0).value, 1.0, 1e-8);
    EXPECT_NEAR(integrate_to_infinity([t](double x) { return x * meander_marginal(t, x); }, 0.0).value,
                meander_mean(t), 1e-6);
    EXPECT_NEAR(integrate_to_infinity([t](double x) { return x * x * meander_marginal(t, x); }, 0.0).value,
                meander_m2(t), 1e-6);
  }
}

TEST(MeanderJoint, IntegratesToMarginalAndCrossMoment) {
  const double t = 0.4;
  for (double x : {0.2, 0.9, 2.0}) {
    const auto r = integrate_to_infinity([&](double y) { return meander_joint(t, x, y); }, 0.0);
    EXPECT_NEAR(r.value, meander_marginal(t, x), 1e-6);
  }
  const auto cross = integrate_to_infinity(
      [&](double x) {
        return x * integrate_to_infinity([&](double y) { return y * meander_joint(t, x, y); }, 0.0, 1e-13, 1e-10)
                       .value;
      },
      0.0, 1e-12, 1e-9);
  EXPECT_NEAR(cross.value, meander_cross(t), 1e-5);
}

TEST(ElementaryLaws, ArcsineAndRayleigh) {
  EXPECT_DOUBLE_EQ(arcsine_density(0.2), arcsine_density(0.8));
  EXPECT_DOUBLE_EQ(arcsine_cdf(0.5), 0.5);
  EXPECT_NEAR(integrate_singular(arcsine_density, 0.0, 1.0).value, 1.0, 1e-10);
  EXPECT_NEAR(integrate_to_infinity(rayleigh_density, 0.0).value, 1.0, 1e-10);
  EXPECT_NEAR(integrate_to_infinity([](double x) { return x * rayleigh_density(x); }, 0.0).value,
              std::sqrt(std::numbers::pi / 2.0), 1e-10);
}

TEST(ExcursionMarginal, DensityMatchesBessel3BridgeAndCdf) {
  for (double t : {0.2, 0.5}) {
    for (double r : {0.1, 0.5, 1.2}) {
      EXPECT_NEAR(excursion_marginal_density(t, r), bessel3_bridge_marginal(0.0, 0.0, 1.0, t, r), 1e-12);
      EXPECT_NEAR(excursion_marginal_cdf(t, r),
                  integrate([t](double s) { return excursion_marginal_density(t, s); }, 0.0, r).value, 1e-10);
    }
  }
}

TEST(Bessel3Bridge, MarginalNormalized) {
  for (auto [x, y] : {std::pair{1.0, 0.0}, {2.0, 0.5}, {0.0, 1.5}}) {
    const auto r = integrate_to_infinity([&](double s) { return bessel3_bridge_marginal(x, y, 1.0, 0.3, s); }, 0.0);
    EXPECT_NEAR(r.value, 1.0, 1e-8);
  }
}

TEST(NonMarkov, NormalizersRatioAndSeparation) {
  const auto d = nonmarkov_densities(-1.0, 0.5, 1.0);
  EXPECT_NEAR(1.0 / d.c1, kNonMarkovMass1, 1e-12);
  EXPECT_NEAR(1.0 / d.c2, kNonMarkovMass2, 1e-12);
  EXPECT_NEAR(integrate([&](double t) { return d.f1(t); }, 0.5, 1.0).value, 1.0, 1e-10);
  EXPECT_NEAR(integrate([&](double t) { return d.f2(t); }, 0.5, 1.0).value, 1.0, 1e-10);
  const double c = d.f2(0.7) / (0.7 * d.f1(0.7));
  for (double t : {0.55, 0.8, 0.95}) EXPECT_NEAR(d.f2(t) / d.f1(t), c * t, 1e-8);
  EXPECT_GT(d.total_variation(), 0.01);
}

TEST(DensityRegistry, AllFamiliesNormalized) {
  const std::map<std::string, double> p{{"lambda", -1.0}, {"t", 0.5}, {"t0", 0.5}, {"x0", 1.0}};
  for (const auto& family : density_families()) {
    auto q = p;
    if (family == "fzhat") q["lambda"] = 1.0;
    const auto s = make_density(family, q);
    EXPECT_NEAR(s.cdf(s.hi), 1.0, 1e-7) << family;
  }
  EXPECT_THROW(make_density("nope", p), std::invalid_argument);
  EXPECT_THROW(make_density("fz", {}), std::invalid_argument);
}

}  // namespace
}  // namespace vervaat
