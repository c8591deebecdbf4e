#ifndef VERVAAT_THRESHOLDS_HPP_
#define VERVAAT_THRESHOLDS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace vervaat {

/*
 * Every pass/fail limit used by the experiment suite, with the reasoning that
 * produced it. Reports carry `version` so a change here is visible in output.
 */
struct Threshold {
  const char* name;
  double value;
  const char* derivation;
};

namespace thresholds {

inline constexpr int kVersion = 1;

/// Scaled Kolmogorov quantile: P(sqrt(n) D > 1.95) is about 0.1%.
inline constexpr double kKsQuantile = 1.95;
/// Added to every KS limit for grid discretization of the continuous law.
inline constexpr double kGridAllowance = 0.005;

inline constexpr Threshold kKsRoute{"ks_route", 0.014,
                                    "1.95*sqrt(2/1e5) + 0.005 grid allowance, two-sample at 1e5 per side"};
inline constexpr Threshold kKsLaw{"ks_law", 0.014, "same limit for one-sample fits at 1e5 samples"};
inline constexpr Threshold kKsConditioned{"ks_conditioned", 0.02,
                                          "rejection-thinned sample (about 1/3 kept) plus 0.005 grid allowance"};
inline constexpr Threshold kKsSlope{"ks_slope", 0.02, "last-segment slope law has an atom; left-limit KS"};
inline constexpr Threshold kMomentZ{"moment_z", 3.0, "|mean - exact| / SE"};
inline constexpr Threshold kCorrelationZ{"correlation_z", 3.0, "|r| * sqrt(n) within a Z bin"};
inline constexpr Threshold kSegmentShiftZ{"segment_shift_z", 2.0,
                                          "|mean(N=4096) - mean(N=2048)| / SE of the difference"};
inline constexpr Threshold kRatioR2{"ratio_r2", 0.99, "R^2 of the histogram ratio regressed on c t"};
inline constexpr Threshold kPositiveTerminal{"positive_terminal", 0.45,
                                             "P(V_1 > 0 | V > 0 on (0, 1/4]) lower bound"};
inline constexpr Threshold kLocalLimitTv{"local_limit_tv", 0.02, "total variation at n = 3200, lambda = -1"};

/*
 * KS limit for n_eff effective samples: the configured value, widened when
 * fewer samples are used so that reduced runs keep the same false-alarm rate.
 */
inline double ks_limit(const Threshold& t, double n_eff) {
  return std::max(t.value, kKsQuantile / std::sqrt(n_eff) + kGridAllowance);
}

inline double two_sample_n_eff(std::size_t n, std::size_t m) {
  return static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
}

}  // namespace thresholds
}  // namespace vervaat

#endif  // VERVAAT_THRESHOLDS_HPP_
