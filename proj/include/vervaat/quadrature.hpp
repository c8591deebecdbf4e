#ifndef VERVAAT_QUADRATURE_HPP_
#define VERVAAT_QUADRATURE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace vervaat {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes (positive half) and weights, from QUADPACK.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kWgk[static_cast<std::size_t>(j)] * s;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * s;
  }
  return {a, b, kronrod * h, std::fabs((kronrod - gauss) * h)};
}

}  // namespace detail

/*
 * Adaptive Gauss-Kronrod (7,15) on [a,b]: the panel with the largest error
 * estimate is bisected until the summed error meets max(abs_tol, rel_tol*|I|).
 * Endpoints are never evaluated, so integrable endpoint singularities are
 * allowed.
 */
template <class F>
QuadratureResult integrate(F f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-11,
                           int max_panels = 4000) {
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b))) throw std::invalid_argument("integrate needs finite limits");
  const double sign = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);
  std::priority_queue<detail::Panel> panels;
  panels.push(detail::gk15(f, a, b));
  double total = panels.top().value;
  double error = panels.top().error;
  int evaluations = 15;
  while (error > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (static_cast<int>(panels.size()) >= max_panels)
      throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "], error estimate " + std::to_string(error));
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw QuadratureError("quadrature panel underflow near " + std::to_string(mid));
    const detail::Panel left = detail::gk15(f, worst.a, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // re-sum to shed the drift of the running updates
  total = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  if (!std::isfinite(total)) throw QuadratureError("quadrature produced a non-finite value");
  return {sign * total, error, evaluations};
}

/*
 * Integral over [a,b] through x = a + (b-a)(1 - cos(pi s))/2, which turns
 * (x-a)^{-1/2} and (b-x)^{-1/2} endpoint singularities into bounded
 * integrands and keeps the nodes resolvable near b.
 */
template <class F>
QuadratureResult integrate_singular(F f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-11) {
  const double half = 0.5 * (b - a);
  auto g = [&](double s) {
    // 1 -+ cos(pi s) written as 2 sin^2 / 2 cos^2 of pi s / 2 to avoid cancellation
    const double sh = std::sin(0.5 * std::numbers::pi * s);
    const double ch = std::cos(0.5 * std::numbers::pi * s);
    double x = s < 0.5 ? a + (b - a) * sh * sh : b - (b - a) * ch * ch;
    // keep strictly inside: f may be infinite at the endpoints themselves
    if (x <= a) x = std::nextafter(a, b);
    if (x >= b) x = std::nextafter(b, a);
    const double v = f(x);
    return v == 0.0 ? 0.0 : v * half * std::numbers::pi * std::sin(std::numbers::pi * s);
  };
  return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

/// Integral over [a, inf) through x = a + s/(1-s).
template <class F>
QuadratureResult integrate_to_infinity(F f, double a, double abs_tol = 1e-13, double rel_tol = 1e-11) {
  auto g = [&](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + s / one_minus;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, abs_tol, rel_tol);
}

/*
 * Distribution function tabulated from a density on [lo, hi]: exact panel
 * integrals at the nodes, cubic Hermite interpolation in between (using the
 * density as slope), clamped to stay monotone.
 */
class TabulatedCdf {
 public:
  template <class Density>
  TabulatedCdf(Density density, double lo, double hi, int panels = 2000)
      : lo_(lo), hi_(hi) {
    if (!(hi > lo) || panels < 1) throw std::invalid_argument("tabulated cdf needs lo < hi and panels >= 1");
    const auto m = static_cast<std::size_t>(panels);
    nodes_.resize(m + 1);
    cdf_.resize(m + 1);
    slope_.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) nodes_[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m);
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i)
      cdf_[i] = cdf_[i - 1] + integrate_singular(density, nodes_[i - 1], nodes_[i], 1e-13, 1e-10).value;
    mass_ = cdf_[m];
    if (!(mass_ > 0.0)) throw std::invalid_argument("density has no mass on the tabulation range");
    for (std::size_t i = 0; i <= m; ++i) {
      cdf_[i] /= mass_;
      const double x = std::clamp(nodes_[i], lo + 1e-300, hi);
      const double d = (i == 0 || i == m) ? 0.0 : density(x);
      slope_[i] = std::isfinite(d) ? d / mass_ : 0.0;
    }
  }

  /// Integral of the density over [lo, hi] before normalization.
  double mass() const { return mass_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double operator()(double x) const {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return 1.0;
    const double h = nodes_[1] - nodes_[0];
    const auto i = std::min(static_cast<std::size_t>((x - lo_) / h), nodes_.size() - 2);
    const double s = (x - nodes_[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    const double v = h00 * cdf_[i] + h10 * h * slope_[i] + h01 * cdf_[i + 1] + h11 * h * slope_[i + 1];
    return std::clamp(v, cdf_[i], cdf_[i + 1]);
  }

 private:
  double lo_, hi_, mass_ = 0.0;
  std::vector<double> nodes_, cdf_, slope_;
};

}  // namespace vervaat

#endif  // VERVAAT_QUADRATURE_HPP_
