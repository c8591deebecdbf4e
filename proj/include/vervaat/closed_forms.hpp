#ifndef VERVAAT_CLOSED_FORMS_HPP_
#define VERVAAT_CLOSED_FORMS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "vervaat/quadrature.hpp"

namespace vervaat {

namespace detail {

inline void require_negative(double lambda) {
  if (!(lambda < 0.0)) throw std::invalid_argument("lambda must be negative");
}

inline constexpr double kSqrt2Pi = 2.5066282746310005024;  // sqrt(2 pi)

}  // namespace detail

// --- kernels ---------------------------------------------------------------

/// Gaussian transition density p_t(x,y).
inline double kernel_p(double t, double x, double y) {
  const double d = x - y;
  return std::exp(-d * d / (2.0 * t)) / (detail::kSqrt2Pi * std::sqrt(t));
}

/*
 * q~_t(x,y) = (e^{-(x-y)^2/2t} - e^{-(x+y)^2/2t}) / (x y sqrt(2 pi t)),
 * continuous at x = 0 or y = 0; q~_t(x,y) y^2 dy is the BES(3) transition law.
 */
inline double kernel_q_tilde(double t, double x, double y) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel time must be positive");
  x = std::fabs(x);
  y = std::fabs(y);
  const double z = x * y / t;
  const double norm = detail::kSqrt2Pi * std::sqrt(t);
  if (z < 1e-3) {
    // 2 sinh(z)/(z t) e^{-(x^2+y^2)/2t}, series for small z
    const double shz = 1.0 + z * z / 6.0 + z * z * z * z / 120.0;
    return 2.0 * shz / t * std::exp(-(x * x + y * y) / (2.0 * t)) / norm;
  }
  const double d = x - y;
  return std::exp(-d * d / (2.0 * t)) * (-std::expm1(-2.0 * z)) / (x * y * norm);
}

/// First hitting density of level y > 0 by Brownian motion started at 0.
inline double kernel_g(double t, double y) {
  if (!(t > 0.0)) return 0.0;
  return std::fabs(y) / (detail::kSqrt2Pi * std::sqrt(t * t * t)) * std::exp(-y * y / (2.0 * t));
}

// --- first return time Z^lambda ---------------------------------------------

/// f_Z(t) = |l| / sqrt(2 pi t (1-t)^3) exp(-l^2 t / (2 (1-t))) on (0,1).
inline double f_Z(double lambda, double t) {
  detail::require_negative(lambda);
  if (!(t > 0.0 && t < 1.0)) return 0.0;
  const double u = 1.0 - t;
  return -lambda / (detail::kSqrt2Pi * std::sqrt(t * u * u * u)) *
         std::exp(-lambda * lambda * t / (2.0 * u));
}

/// P(Z <= t) with Z = G^2/(l^2 + G^2): erf(|l| sqrt(t/(1-t)) / sqrt 2).
inline double cdf_Z(double lambda, double t) {
  detail::require_negative(lambda);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return std::erf(-lambda * std::sqrt(t / (1.0 - t)) / std::numbers::sqrt2);
}

/// Mirror law for positive endpoints: f_Zhat(l, t) = f_Z(-l, 1-t).
inline double f_Zhat(double lambda, double t) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return f_Z(-lambda, 1.0 - t);
}

inline double cdf_Zhat(double lambda, double t) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return 1.0 - cdf_Z(-lambda, 1.0 - t);
}

/// f_A(a) = int_a^1 f_Z(t)/t dt, the law of A = U Z with U uniform.
inline double f_A(double lambda, double a) {
  detail::require_negative(lambda);
  if (!(a > 0.0 && a < 1.0)) return 0.0;
  return integrate([&](double t) { return f_Z(lambda, t) / t; }, a, 1.0, 1e-14, 1e-12).value;
}

/// P(A <= a) = P(Z <= a) + a f_A(a).
inline double cdf_A(double lambda, double a) {
  if (lambda == 0.0) return std::clamp(a, 0.0, 1.0);
  detail::require_negative(lambda);
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  return cdf_Z(lambda, a) + a * f_A(lambda, a);
}

/// e^{l^2/2} int_{|l|}^inf e^{-s^2/2} ds.
inline double mills_tail(double lambda) {
  const double m = std::fabs(lambda);
  return std::sqrt(std::numbers::pi / 2.0) * std::exp(m * m / 2.0 + std::log(std::erfc(m / std::numbers::sqrt2)));
}

/// P(V(B^{l,br})_t > l t on (0,1)) = 1 - |l| mills_tail(l) = E Z^l.
inline double prob_above_drift(double lambda) {
  detail::require_negative(lambda);
  return 1.0 + lambda * mills_tail(lambda);
}

/// Law of the first return time conditioned on staying above the drift line.
inline double f_Z_conditioned(double lambda, double t) {
  return t * f_Z(lambda, t) / prob_above_drift(lambda);
}

inline double cdf_Z_conditioned(double lambda, double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return integrate([&](double s) { return f_Z_conditioned(lambda, s); }, 0.0, t, 1e-14, 1e-12).value;
}

/*
 * P(s_l in [l, a]) = 1 + a mills_tail(l) for a in [l, 0]. The value at a = l is
 * the mass of the atom {s_l = l}.
 */
inline double slope_last_segment_cdf(double lambda, double a) {
  detail::require_negative(lambda);
  if (a < lambda || a > 0.0) throw std::domain_error("slope argument must lie in [lambda, 0]");
  return 1.0 + a * mills_tail(lambda);
}

// --- moments ---------------------------------------------------------------

inline double mean_VB(double t) {
  return std::sqrt(8.0 / std::numbers::pi) * (std::sqrt(t) + std::sqrt(1.0 - t) - 1.0);
}

inline double second_moment_VB(double t) {
  return 3.0 * t + (4.0 - 8.0 * t) / std::numbers::pi * std::asin(std::sqrt(t)) -
         4.0 / std::numbers::pi * std::sqrt(t * (1.0 - t));
}

inline double meander_mean(double t) {
  return std::sqrt(2.0 / std::numbers::pi) * (std::sqrt(t * (1.0 - t)) + std::asin(std::sqrt(t)));
}

inline double meander_m2(double t) { return 3.0 * t - t * t; }

/// E B^me_t B^me_1.
inline double meander_cross(double t) { return 2.0 * std::sqrt(t); }

/*
 * Meander marginal t^{-3/2} x e^{-x^2/2t} erf(x / sqrt(2(1-t))) with the
 * standard erf (erf(inf) = 1); at t = 1 this is the Rayleigh density.
 */
inline double meander_marginal(double t, double x) {
  if (!(x > 0.0) || !(t > 0.0)) return 0.0;
  const double e = t >= 1.0 ? 1.0 : std::erf(x / std::sqrt(2.0 * (1.0 - t)));
  return std::pow(t, -1.5) * x * std::exp(-x * x / (2.0 * t)) * e;
}

/// Joint density of (B^me_t, B^me_1).
inline double meander_joint(double t, double x, double y) {
  if (!(x > 0.0 && y > 0.0 && t > 0.0 && t < 1.0)) return 0.0;
  return std::pow(t, -1.5) * x * std::exp(-x * x / (2.0 * t)) *
         (kernel_p(1.0 - t, x, y) - kernel_p(1.0 - t, x, -y));
}

// --- elementary laws -------------------------------------------------------

inline double arcsine_density(double a) {
  if (!(a > 0.0 && a < 1.0)) return 0.0;
  return 1.0 / (std::numbers::pi * std::sqrt(a * (1.0 - a)));
}

inline double arcsine_cdf(double a) {
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(a));
}

inline double rayleigh_density(double x) { return x > 0.0 ? x * std::exp(-x * x / 2.0) : 0.0; }

inline double rayleigh_cdf(double x) { return x > 0.0 ? -std::expm1(-x * x / 2.0) : 0.0; }

/// Marginal at time t of an excursion of length l (BES(3) bridge 0 -> 0).
inline double excursion_marginal_density(double t, double r, double duration = 1.0) {
  if (!(r > 0.0)) return 0.0;
  const double s = t * (duration - t) / duration;
  return std::sqrt(2.0 / std::numbers::pi) * r * r * std::exp(-r * r / (2.0 * s)) / std::pow(s, 1.5);
}

inline double excursion_marginal_cdf(double t, double r, double duration = 1.0) {
  if (!(r > 0.0)) return 0.0;
  const double s = t * (duration - t) / duration;
  const double u = r / std::sqrt(s);
  return std::erf(u / std::numbers::sqrt2) - std::sqrt(2.0 / std::numbers::pi) * u * std::exp(-u * u / 2.0);
}

/// Marginal density at time t of a BES(3) bridge x -> y over [0, l].
inline double bessel3_bridge_marginal(double x, double y, double duration, double t, double r) {
  if (!(r > 0.0) || !(t > 0.0 && t < duration)) return 0.0;
  return kernel_q_tilde(t, x, r) * r * r * kernel_q_tilde(duration - t, r, y) /
         kernel_q_tilde(duration, x, y);
}

// --- non-Markov witness ----------------------------------------------------

/*
 * The two conditional laws of T_{t0} (first return to 0 after t0):
 *   f1 ∝ (t-t0)^{-3/2} (1-t)^{-3/2} exp(-x0^2/(2(t-t0)) - l^2/(2(1-t)))
 *   f2 ∝ t f1,
 * both normalized on (t0, 1).
 */
struct NonMarkovDensities {
  double lambda, t0, x0;
  double c1, c2;  // normalizing constants: f1 = c1 * shape, f2 = c2 * t * shape

  double shape(double t) const {
    if (!(t > t0 && t < 1.0)) return 0.0;
    const double a = t - t0, b = 1.0 - t;
    return std::exp(-x0 * x0 / (2.0 * a) - lambda * lambda / (2.0 * b)) / std::sqrt(a * a * a * b * b * b);
  }
  double f1(double t) const { return c1 * shape(t); }
  double f2(double t) const { return c2 * t * shape(t); }

  double total_variation() const {
    return 0.5 * integrate([&](double t) { return std::fabs(f1(t) - f2(t)); }, t0, 1.0, 1e-14, 1e-11).value;
  }
};

inline NonMarkovDensities nonmarkov_densities(double lambda, double t0, double x0) {
  detail::require_negative(lambda);
  if (!(t0 > 0.0 && t0 < 1.0) || !(x0 > 0.0)) throw std::invalid_argument("need 0 < t0 < 1 and x0 > 0");
  NonMarkovDensities d{lambda, t0, x0, 1.0, 1.0};
  const double m1 = integrate([&](double t) { return d.shape(t); }, t0, 1.0, 1e-300, 1e-13).value;
  const double m2 = integrate([&](double t) { return t * d.shape(t); }, t0, 1.0, 1e-300, 1e-13).value;
  d.c1 = 1.0 / m1;
  d.c2 = 1.0 / m2;
  return d;
}

// --- density registry ------------------------------------------------------

/*
 * A named density with a parameter map, support and distribution function.
 * Proper densities are checked to integrate to 1 at construction.
 */
struct DensitySpec {
  std::string family;
  std::map<std::string, double> params;
  double lo = 0.0;
  double hi = 1.0;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
};

namespace detail {

inline double param(const std::map<std::string, double>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw std::invalid_argument("missing parameter '" + key + "'");
  return it->second;
}

}  // namespace detail

inline std::vector<std::string> density_families() {
  return {"fz", "fa", "fzhat", "fzcond", "arcsine", "rayleigh", "meander", "excursion", "f1", "f2"};
}

inline DensitySpec make_density(const std::string& family, const std::map<std::string, double>& p) {
  DensitySpec s{family, p, 0.0, 1.0, {}, {}};
  if (family == "fz") {
    const double l = detail::param(p, "lambda");
    detail::require_negative(l);
    s.density = [l](double t) { return f_Z(l, t); };
    s.cdf = [l](double t) { return cdf_Z(l, t); };
  } else if (family == "fa") {
    const double l = detail::param(p, "lambda");
    detail::require_negative(l);
    s.density = [l](double a) { return f_A(l, a); };
    s.cdf = [l](double a) { return cdf_A(l, a); };
  } else if (family == "fzhat") {
    const double l = detail::param(p, "lambda");
    if (!(l > 0.0)) throw std::invalid_argument("fzhat needs lambda > 0");
    s.density = [l](double t) { return f_Zhat(l, t); };
    s.cdf = [l](double t) { return cdf_Zhat(l, t); };
  } else if (family == "fzcond") {
    const double l = detail::param(p, "lambda");
    detail::require_negative(l);
    s.density = [l](double t) { return f_Z_conditioned(l, t); };
    s.cdf = [l](double t) { return cdf_Z_conditioned(l, t); };
  } else if (family == "arcsine") {
    s.density = arcsine_density;
    s.cdf = arcsine_cdf;
  } else if (family == "rayleigh") {
    s.hi = 40.0;
    s.density = rayleigh_density;
    s.cdf = rayleigh_cdf;
  } else if (family == "meander") {
    const double t = detail::param(p, "t");
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("meander marginal needs 0 < t <= 1");
    s.hi = 40.0;
    s.density = [t](double x) { return meander_marginal(t, x); };
    s.cdf = [t](double x) {
      return x <= 0.0 ? 0.0 : integrate([t](double y) { return meander_marginal(t, y); }, 0.0, x).value;
    };
  } else if (family == "excursion") {
    const double t = detail::param(p, "t");
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("excursion marginal needs 0 < t < 1");
    s.hi = 40.0;
    s.density = [t](double r) { return excursion_marginal_density(t, r); };
    s.cdf = [t](double r) { return excursion_marginal_cdf(t, r); };
  } else if (family == "f1" || family == "f2") {
    const auto d = nonmarkov_densities(detail::param(p, "lambda"), detail::param(p, "t0"), detail::param(p, "x0"));
    const bool first = family == "f1";
    s.lo = d.t0;
    s.density = [d, first](double t) { return first ? d.f1(t) : d.f2(t); };
    s.cdf = [d, first](double t) {
      if (t <= d.t0) return 0.0;
      return integrate([&](double u) { return first ? d.f1(u) : d.f2(u); }, d.t0, std::min(t, 1.0)).value;
    };
  } else {
    throw std::invalid_argument("unknown density family '" + family + "'");
  }
  const double mass = integrate_singular(s.density, s.lo, s.hi, 1e-13, 1e-11).value;
  if (std::fabs(mass - 1.0) > 1e-8)
    throw std::logic_error("density '" + family + "' integrates to " + std::to_string(mass));
  return s;
}

}  // namespace vervaat

#endif  // VERVAAT_CLOSED_FORMS_HPP_
