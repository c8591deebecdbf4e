#ifndef VERVAAT_STATS_HPP_
#define VERVAAT_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace vervaat {

inline constexpr std::size_t kMinKsSamples = 100;

class NonMonotoneCdfError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/*
 * sup_x |F_n(x) - F(x)|. `cdf_left` is the left limit F(x-), which differs
 * from F only at atoms; pass the same function for continuous laws.
 */
template <class Cdf, class CdfLeft>
double ks_one_sample(std::span<const double> samples, Cdf cdf, CdfLeft cdf_left) {
  if (samples.size() < kMinKsSamples) throw std::invalid_argument("KS test needs at least 100 samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  double prev_f = -1.0;
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;  // ties share one ECDF jump
    const double f = cdf(x[i]);
    const double fl = cdf_left(x[i]);
    if (!(f >= prev_f - 1e-12) || fl > f + 1e-12 || f < -1e-12 || f > 1.0 + 1e-12)
      throw NonMonotoneCdfError("reference cdf is not a monotone distribution function");
    prev_f = f;
    d = std::max({d, std::fabs(static_cast<double>(j) / n - f), std::fabs(fl - static_cast<double>(i) / n)});
    i = j;
  }
  return d;
}

template <class Cdf>
double ks_one_sample(std::span<const double> samples, Cdf cdf) {
  return ks_one_sample(samples, cdf, cdf);
}

/*
 * KS distance for a sample on the lattice {0, 1, ..., cells}: both the ECDF
 * and the reference law are step functions there, so the supremum is taken
 * over lattice points. lattice_cdf(k) = P(X <= k).
 */
template <class LatticeCdf>
double ks_lattice(std::span<const std::size_t> indices, std::size_t cells, LatticeCdf lattice_cdf) {
  if (indices.size() < kMinKsSamples) throw std::invalid_argument("KS test needs at least 100 samples");
  std::vector<std::size_t> count(cells + 1, 0);
  for (std::size_t k : indices) {
    if (k > cells) throw std::invalid_argument("lattice sample outside {0, ..., cells}");
    ++count[k];
  }
  const double n = static_cast<double>(indices.size());
  double d = 0.0, cum = 0.0, prev_g = 0.0;
  for (std::size_t k = 0; k <= cells; ++k) {
    cum += static_cast<double>(count[k]);
    const double g = lattice_cdf(k);
    if (!(g >= prev_g - 1e-12) || g > 1.0 + 1e-12)
      throw NonMonotoneCdfError("reference cdf is not a monotone distribution function");
    prev_g = g;
    d = std::max(d, std::fabs(cum / n - g));
  }
  return d;
}

/// sup_x |F_n(x) - G_m(x)|.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.size() < kMinKsSamples || b.size() < kMinKsSamples)
    throw std::invalid_argument("KS test needs at least 100 samples per side");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

/// Asymptotic P(sqrt(n_eff) D > x), Kolmogorov distribution.
inline double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.3) {
    // small-x form: 1 - sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    double s = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double a = (2.0 * k - 1.0) * std::numbers::pi / x;
      s += std::exp(-a * a / 8.0);
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

/// Welford accumulator for mean and variance.
class Moments {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const Moments& o) {
    if (o.n_ == 0) return;
    const double total = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / total;
    mean_ += d * static_cast<double>(o.n_) / total;
    n_ += o.n_;
  }
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// |mean - expected| / SE; infinite if SE vanishes while the means differ.
inline double z_score(const Moments& m, double expected) {
  const double se = m.standard_error();
  const double diff = std::fabs(m.mean() - expected);
  if (se == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
  return diff / se;
}

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("correlation needs paired samples, n >= 3");
  Moments mx, my;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx.add(x[i]);
    my.add(y[i]);
  }
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx.mean()) * (y[i] - my.mean());
  sxy /= static_cast<double>(x.size() - 1);
  const double denom = std::sqrt(mx.variance() * my.variance());
  return denom > 0.0 ? sxy / denom : 0.0;
}

/// Standard error of a sample correlation under independence.
inline double correlation_standard_error(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

struct OriginFit {
  double slope = 0.0;
  double r_squared = 0.0;  // 1 - SS_res / SS_tot, SS_tot about the weighted mean
};

/// Weighted least squares fit of y = c x.
inline OriginFit fit_through_origin(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> w = {}) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit needs paired data, n >= 2");
  auto weight = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
  double sxy = 0.0, sxx = 0.0, sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += weight(i) * x[i] * y[i];
    sxx += weight(i) * x[i] * x[i];
    sw += weight(i);
    swy += weight(i) * y[i];
  }
  OriginFit fit;
  fit.slope = sxy / sxx;
  const double ybar = swy / sw;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.slope * x[i];
    ss_res += weight(i) * r * r;
    ss_tot += weight(i) * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson chi-square of observed counts against expected probabilities.
inline ChiSquare chi_square(std::span<const double> observed, std::span<const double> probs) {
  if (observed.size() != probs.size() || observed.size() < 2) throw std::invalid_argument("chi-square needs >= 2 cells");
  double n = 0.0;
  for (double o : observed) n += o;
  ChiSquare c;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = n * probs[i];
    if (e <= 0.0) throw std::invalid_argument("chi-square cell with zero expectation");
    c.statistic += (observed[i] - e) * (observed[i] - e) / e;
  }
  c.dof = static_cast<int>(observed.size()) - 1;
  c.p_value = boost::math::gamma_q(c.dof / 2.0, c.statistic / 2.0);
  return c;
}

}  // namespace vervaat

#endif  // VERVAAT_STATS_HPP_
