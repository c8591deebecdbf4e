#ifndef VERVAAT_SAMPLERS_HPP_
#define VERVAAT_SAMPLERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vervaat/path.hpp"
#include "vervaat/rng.hpp"

namespace vervaat {

/*
 * Every sampler below is exact in law at the grid points: Gaussian increments
 * for Brownian pieces, norms of 3-d Brownian bridges for BES(3) bridges.
 */

namespace detail {

inline void require_grid(std::size_t n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one cell");
}

// Brownian motion on n cells of length duration/n, started at 0, in place.
inline void fill_brownian(std::span<double> out, double duration, RngStream& stream) {
  const std::size_t n = out.size() - 1;
  out[0] = 0.0;
  stream.fill_normal(out.subspan(1));
  const double sd = std::sqrt(duration / static_cast<double>(n));
  double acc = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    acc += sd * out[i];
    out[i] = acc;
  }
}

// Turns a Brownian path into the bridge start -> end, in place.
inline void pin_bridge(std::span<double> w, double start, double end) {
  const std::size_t n = w.size() - 1;
  const double shift = w[n] - (end - start);
  for (std::size_t i = 0; i <= n; ++i)
    w[i] = start + w[i] - static_cast<double>(i) / static_cast<double>(n) * shift;
  w[0] = start;
  w[n] = end;
}

}  // namespace detail

inline SampledPath sample_bm(std::size_t n, RngStream& stream, double duration = 1.0) {
  detail::require_grid(n);
  std::vector<double> v(n + 1);
  detail::fill_brownian(v, duration, stream);
  return SampledPath(duration, std::move(v));
}

/// B_t - (t/l) B_l + (t/l) lambda; values[N] = lambda exactly.
inline SampledPath sample_bridge(double lambda, double duration, std::size_t n, RngStream& stream) {
  detail::require_grid(n);
  std::vector<double> v(n + 1);
  detail::fill_brownian(v, duration, stream);
  detail::pin_bridge(v, 0.0, lambda);
  return SampledPath(duration, std::move(v));
}

/// |3-d Brownian bridge from (x,0,0) to (y,0,0)| over [0, l]; endpoints exact.
inline SampledPath sample_bessel3_bridge(double x, double y, double duration, std::size_t n, RngStream& stream) {
  detail::require_grid(n);
  if (x < 0.0 || y < 0.0) throw std::invalid_argument("BES(3) bridge endpoints must be nonnegative");
  std::vector<double> c1(n + 1), c2(n + 1), c3(n + 1);
  detail::fill_brownian(c1, duration, stream);
  detail::fill_brownian(c2, duration, stream);
  detail::fill_brownian(c3, duration, stream);
  detail::pin_bridge(c1, x, y);
  detail::pin_bridge(c2, 0.0, 0.0);
  detail::pin_bridge(c3, 0.0, 0.0);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = std::sqrt(c1[i] * c1[i] + c2[i] * c2[i] + c3[i] * c3[i]);
  v[0] = x;
  v[n] = y;
  return SampledPath(duration, std::move(v));
}

enum class ExcursionRoute { vervaat, bessel3 };

/// Excursion of length l: Vervaat transform of a 0 -> 0 bridge, or BES(3) bridge 0 -> 0.
inline SampledPath sample_excursion(double duration, std::size_t n, RngStream& stream,
                                    ExcursionRoute route = ExcursionRoute::bessel3) {
  if (route == ExcursionRoute::bessel3) return sample_bessel3_bridge(0.0, 0.0, duration, n, stream);
  const SampledPath v = vervaat_grid(sample_bridge(0.0, 1.0, n, stream));
  const double scale = std::sqrt(duration);
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = scale * v[i];
  out[0] = 0.0;
  out[n] = 0.0;
  return SampledPath(duration, std::move(out));
}

/// First passage bridge 0 -> lambda < 0: lambda + BES(3) bridge |lambda| -> 0.
inline SampledPath sample_fpb(double lambda, double duration, std::size_t n, RngStream& stream) {
  if (!(lambda < 0.0)) throw std::invalid_argument("first passage bridge needs lambda < 0");
  SampledPath p = sample_bessel3_bridge(-lambda, 0.0, duration, n, stream);
  for (double& x : p.values()) x += lambda;
  p[0] = 0.0;
  p[n] = lambda;
  return p;
}

/// Meander of length l: sqrt(l) times a BES(3) bridge 0 -> rho, rho Rayleigh.
inline SampledPath sample_meander(std::size_t n, RngStream& stream, double duration = 1.0) {
  const double rho = stream.rayleigh();
  SampledPath p = sample_bessel3_bridge(0.0, rho, 1.0, n, stream);
  if (duration == 1.0) return p;
  const double scale = std::sqrt(duration);
  std::vector<double> out(p.values().begin(), p.values().end());
  for (double& x : out) x *= scale;
  return SampledPath(duration, std::move(out));
}

inline SampledPath sample_vervaat_bridge_direct(double lambda, std::size_t n, RngStream& stream) {
  return vervaat_grid(sample_bridge(lambda, 1.0, n, stream));
}

struct DecompositionRecord {
  double z = 0.0;        // exact draw G^2/(lambda^2 + G^2)
  double z_grid = 0.0;   // split time used on the grid, split.value / N
  SplitIndex split;      // grid index of the splice
  SampledPath excursion; // piece on [0, z_grid]
  SampledPath passage;   // first passage bridge on [z_grid, 1], started at 0
};

/*
 * Excursion of length Z followed by a first passage bridge to lambda.
 * The excursion gets m = clamp(ceil(Z N), 2, N-1) cells, so Z is moved up to
 * the grid; the splice point carries the value 0 exactly.
 */
inline std::pair<SampledPath, DecompositionRecord> sample_vervaat_bridge_decomposed(double lambda, std::size_t n,
                                                                                    RngStream& stream) {
  if (!(lambda < 0.0)) throw std::invalid_argument("decomposed sampler needs lambda < 0");
  if (n < 3) throw std::invalid_argument("decomposed sampler needs N >= 3");
  const double g = stream.normal();
  const double z = g * g / (lambda * lambda + g * g);
  const double nd = static_cast<double>(n);
  const auto m = static_cast<std::size_t>(std::clamp(std::ceil(z * nd), 2.0, nd - 1.0));
  const double z_grid = static_cast<double>(m) / nd;
  SampledPath exc = sample_bessel3_bridge(0.0, 0.0, z_grid, m, stream);
  SampledPath fpb = sample_fpb(lambda, 1.0 - z_grid, n - m, stream);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= m; ++i) v[i] = exc[i];
  for (std::size_t i = m; i <= n; ++i) v[i] = fpb[i - m];
  v[m] = 0.0;
  return {SampledPath(1.0, std::move(v)),
          DecompositionRecord{z, z_grid, {m}, std::move(exc), std::move(fpb)}};
}

/// B^ex_t + lambda t.
inline SampledPath sample_drifting_excursion(double lambda, std::size_t n, RngStream& stream,
                                             ExcursionRoute route = ExcursionRoute::vervaat) {
  if (!(lambda < 0.0)) throw std::invalid_argument("drifting excursion needs lambda < 0");
  SampledPath p = sample_excursion(1.0, n, stream, route);
  for (std::size_t i = 0; i <= n; ++i) p[i] += lambda * static_cast<double>(i) / static_cast<double>(n);
  p[n] = lambda;
  return p;
}

/*
 * V(B) from the split at the minimum: A arcsine, k = round(A N) in [1, N-1],
 *   V[i] = sqrt(k/N) me1[i]                                       i <= k
 *   V[i] = sqrt(k/N) me1[k] + sqrt(1-k/N) (me2[N-i] - me2[N-k])    i >= k
 * with me1, me2 independent standard meanders on k and N-k cells.
 */
inline std::pair<SampledPath, SplitIndex> sample_meander_pair_denisov(std::size_t n, RngStream& stream) {
  if (n < 2) throw std::invalid_argument("Denisov sampler needs N >= 2");
  const double nd = static_cast<double>(n);
  const double a = stream.arcsine();
  const auto k = static_cast<std::size_t>(std::clamp(std::round(a * nd), 1.0, nd - 1.0));
  const double a_grid = static_cast<double>(k) / nd;
  const SampledPath me1 = sample_meander(k, stream);
  const SampledPath me2 = sample_meander(n - k, stream);
  const double s1 = std::sqrt(a_grid), s2 = std::sqrt(1.0 - a_grid);
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= k; ++i) v[i] = s1 * me1[i];
  const double top = s1 * me1[k];
  const double base = me2[n - k];
  for (std::size_t i = k + 1; i <= n; ++i) v[i] = top + s2 * (me2[n - i] - base);
  return {SampledPath(1.0, std::move(v)), {k}};
}

// --- dispatch --------------------------------------------------------------

enum class Process {
  bm,
  bridge,
  excursion,
  fpb,
  meander,
  vervaat_direct,
  vervaat_decomposed,
  drift_excursion,
  denisov,
};

inline const std::vector<std::pair<std::string, Process>>& process_names() {
  static const std::vector<std::pair<std::string, Process>> names{
      {"bm", Process::bm},
      {"bridge", Process::bridge},
      {"excursion", Process::excursion},
      {"fpb", Process::fpb},
      {"meander", Process::meander},
      {"vervaat-direct", Process::vervaat_direct},
      {"vervaat-decomposed", Process::vervaat_decomposed},
      {"drift-excursion", Process::drift_excursion},
      {"denisov", Process::denisov},
  };
  return names;
}

inline Process parse_process(const std::string& name) {
  for (const auto& [key, p] : process_names())
    if (key == name) return p;
  throw std::invalid_argument("unknown process '" + name + "'");
}

struct SamplerSpec {
  Process process = Process::bm;
  double lambda = 0.0;
  double duration = 1.0;
  std::size_t n_steps = 1024;
};

inline SampledPath sample(const SamplerSpec& spec, RngStream& stream) {
  if (spec.n_steps < 2) throw std::invalid_argument("grid size N must be at least 2");
  if (!(spec.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  const bool unit = spec.duration == 1.0;
  auto need_unit = [&] {
    if (!unit) throw std::invalid_argument("this process is defined on [0,1]; use duration 1");
  };
  switch (spec.process) {
    case Process::bm:
      return sample_bm(spec.n_steps, stream, spec.duration);
    case Process::bridge:
      return sample_bridge(spec.lambda, spec.duration, spec.n_steps, stream);
    case Process::excursion:
      return sample_excursion(spec.duration, spec.n_steps, stream);
    case Process::fpb:
      return sample_fpb(spec.lambda, spec.duration, spec.n_steps, stream);
    case Process::meander:
      return sample_meander(spec.n_steps, stream, spec.duration);
    case Process::vervaat_direct:
      need_unit();
      return sample_vervaat_bridge_direct(spec.lambda, spec.n_steps, stream);
    case Process::vervaat_decomposed:
      need_unit();
      return sample_vervaat_bridge_decomposed(spec.lambda, spec.n_steps, stream).first;
    case Process::drift_excursion:
      need_unit();
      return sample_drifting_excursion(spec.lambda, spec.n_steps, stream);
    case Process::denisov:
      need_unit();
      return sample_meander_pair_denisov(spec.n_steps, stream).first;
  }
  throw std::logic_error("unhandled process");
}

}  // namespace vervaat

#endif  // VERVAAT_SAMPLERS_HPP_
