#ifndef VERVAAT_EXPERIMENTS_HPP_
#define VERVAAT_EXPERIMENTS_HPP_

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vervaat/closed_forms.hpp"
#include "vervaat/convex_minorant.hpp"
#include "vervaat/lattice.hpp"
#include "vervaat/parallel.hpp"
#include "vervaat/path.hpp"
#include "vervaat/quadrature.hpp"
#include "vervaat/rng.hpp"
#include "vervaat/samplers.hpp"
#include "vervaat/stats.hpp"
#include "vervaat/thresholds.hpp"

namespace vervaat {

using Json = nlohmann::json;

inline constexpr int kReportSchema = 1;

struct Check {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::string rule;  // "<", ">=", "=="
  bool passed = false;
  std::string derivation;
};

inline Check check_below(std::string name, double statistic, double limit, std::string derivation) {
  return {std::move(name), statistic, limit, "<", statistic < limit, std::move(derivation)};
}

inline Check check_at_least(std::string name, double statistic, double limit, std::string derivation) {
  return {std::move(name), statistic, limit, ">=", statistic >= limit, std::move(derivation)};
}

inline Check check_equal(std::string name, double statistic, double expected, std::string derivation) {
  return {std::move(name), statistic, expected, "==", statistic == expected, std::move(derivation)};
}

/*
 * grid == 0 selects the experiment's own default. Results depend only on
 * (experiment, parameters, seed, reps, grid), never on workers.
 */
struct ExperimentConfig {
  std::uint64_t seed = 7;
  std::size_t reps = 100000;
  std::size_t grid = 0;
  unsigned workers = default_workers();
  bool timing = false;
};

struct ExperimentReport {
  std::string id;
  Json parameters = Json::object();
  std::size_t replicates = 0;
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  std::map<std::string, double> estimates;
  std::optional<double> wall_seconds;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  const Check* find_check(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  Json to_json() const {
    auto number = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
    Json j;
    j["schema"] = kReportSchema;
    j["thresholds_version"] = thresholds::kVersion;
    j["id"] = id;
    j["parameters"] = parameters;
    j["replicates"] = replicates;
    j["grid"] = grid;
    j["seed"] = seed;
    j["checks"] = Json::array();
    for (const auto& c : checks)
      j["checks"].push_back({{"name", c.name},
                             {"statistic", number(c.statistic)},
                             {"threshold", number(c.threshold)},
                             {"rule", c.rule},
                             {"passed", c.passed},
                             {"derivation", c.derivation}});
    j["estimates"] = Json::object();
    for (const auto& [k, v] : estimates) j["estimates"][k] = number(v);
    j["passed"] = passed();
    if (wall_seconds) j["wall_seconds"] = *wall_seconds;
    return j;
  }
};

namespace detail {

inline constexpr std::array<double, 3> kMarginalTimes{0.25, 0.5, 0.75};

inline std::string fixed(double x, int digits = 2) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline RngStream stream(const ExperimentConfig& cfg, std::uint64_t tag, std::size_t rep) {
  return RngStream(cfg.seed, stream_id_for(tag, rep));
}

inline std::size_t grid_or(const ExperimentConfig& cfg, std::size_t fallback) {
  return cfg.grid == 0 ? fallback : cfg.grid;
}

inline void require_quarter_grid(std::size_t n) {
  if (n < 8 || n % 4 != 0) throw std::invalid_argument("grid must be a multiple of 4 and at least 8");
}

inline void require_reps(std::size_t reps) {
  if (reps < kMinKsSamples) throw std::invalid_argument("experiments need at least 100 replicates");
}

template <class T, class F>
std::vector<double> column(const std::vector<T>& rows, F f) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(f(r));
  return out;
}

inline double ks_route_limit(std::size_t n, std::size_t m) {
  return thresholds::ks_limit(thresholds::kKsRoute, thresholds::two_sample_n_eff(n, m));
}

inline double ks_law_limit(const Threshold& t, std::size_t n) {
  return thresholds::ks_limit(t, static_cast<double>(n));
}

inline std::string ks_note(const Threshold& t) {
  return std::string(t.derivation) + "; widened to 1.95/sqrt(n_eff) + 0.005 for smaller runs";
}

/*
 * First passage below an interior level with the Brownian-bridge crossing
 * test inside each cell: P(cross | ends a, b above) = exp(-2ab/dt). The hit is
 * placed at the cell midpoint. Valid where the path is locally Brownian, i.e.
 * away from any conditioning barrier.
 */
inline double first_time_below_bridge_corrected(const SampledPath& p, double level, RngStream& s) {
  for (std::size_t i = 0; i < p.n_steps(); ++i) {
    const double a = p[i] - level, b = p[i + 1] - level;
    if (b <= 0.0 || s.uniform() < std::exp(-2.0 * a * b / p.dt())) return p.time(i) + 0.5 * p.dt();
  }
  return p.duration();
}

/*
 * cum[k] = P(floor(U M) <= k) for the cyclic shift index of the Biane shift
 * experiment, M = clamp(ceil(Z N), 2, N-1) the excursion cell count of the
 * decomposed sampler. lambda = 0 means M = N.
 */
inline std::vector<double> shift_index_cdf(double lambda, std::size_t n) {
  std::vector<double> pm(n + 1, 0.0);
  if (lambda == 0.0) {
    pm[n] = 1.0;
  } else {
    const double nd = static_cast<double>(n);
    pm[2] = cdf_Z(lambda, 2.0 / nd);
    for (std::size_t m = 3; m + 1 < n; ++m)
      pm[m] = cdf_Z(lambda, static_cast<double>(m) / nd) - cdf_Z(lambda, static_cast<double>(m - 1) / nd);
    pm[n - 1] = 1.0 - cdf_Z(lambda, static_cast<double>(n - 2) / nd);
  }
  std::vector<double> cum(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 2; m <= n; ++m)
      cum[k] += pm[m] * std::min(1.0, static_cast<double>(k + 1) / static_cast<double>(m));
  return cum;
}

/*
 * KS of grid-read passage times against the lattice image of a continuous law
 * with cdf F on [0,1]. A crossing reported at the right end of its cell is
 * ceil(T N)/N, so P(index <= k) = F(k/N); at the left end it is floor(T N)/N
 * and P(index <= k) = F((k+1)/N). Comparing the lattice sample with F itself
 * would charge the mass F(1/N) that no grid time can carry, which is of order
 * N^(-1/2) for the passage laws here.
 */
enum class CellEnd { right, left };

template <class Cdf>
double ks_grid_times(std::span<const double> times, std::size_t n, CellEnd end, Cdf cdf) {
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  const double nd = static_cast<double>(n);
  for (double t : times) idx.push_back(static_cast<std::size_t>(std::llround(std::clamp(t, 0.0, 1.0) * nd)));
  return ks_lattice(idx, n, [&](std::size_t k) {
    const std::size_t j = end == CellEnd::right ? k : k + 1;
    return j >= n ? 1.0 : std::clamp(cdf(static_cast<double>(j) / nd), 0.0, 1.0);
  });
}

inline std::string lattice_note(const Threshold& t) {
  return ks_note(t) + "; sample and law compared on the 1/N lattice of grid times";
}

inline double normal_bridge_cdf(double lambda, double t, double x) {
  return normal_cdf((x - lambda * t) / std::sqrt(t * (1.0 - t)));
}

}  // namespace detail

// --- 1: exact discrete suite ---------------------------------------------

inline ExperimentReport experiment_discrete_exact(const ExperimentConfig& cfg, int max_n = 14, int max_quantile_n = 12) {
  ExperimentReport r;
  r.id = "discrete_exact";
  r.seed = cfg.seed;
  r.parameters = {{"max_n", max_n}, {"max_quantile_n", max_quantile_n}};
  std::size_t cases = 0, bijection_bad = 0, pmf_bad = 0, piece_cases = 0, piece_bad = 0, images = 0,
              helper_bad = 0, quantile_bad = 0;
  for (int n = 1; n <= max_n; ++n) {
    for (int a : negative_endpoints(n)) {
      ++cases;
      if (!bijection_holds(n, a)) ++bijection_bad;
      const ExactPmf pmf = z_pmf(n, a);
      if (!(pmf == empirical_z_pmf(n, a)) || pmf.total() != 1) ++pmf_bad;
      for (const auto& [l, mass] : pmf.mass) {
        ++piece_cases;
        const PieceLaws laws = conditional_piece_laws(n, a, l);
        if (!laws.independent || !laws.uniform) ++piece_bad;
      }
      for (const auto& [v, law] : helper_distribution(n, a)) {
        ++images;
        if (!law.uniform_over_first_return) ++helper_bad;
      }
    }
  }
  for (int n = 1; n <= max_quantile_n; ++n)
    if (!quantile_vervaat_multisets_equal(n)) ++quantile_bad;
  const char* exact = "exact enumeration; any failure is a counterexample";
  r.checks.push_back(check_equal("bijection_failures", static_cast<double>(bijection_bad), 0.0, exact));
  r.checks.push_back(check_equal("z_pmf_mismatches", static_cast<double>(pmf_bad), 0.0, exact));
  r.checks.push_back(check_equal("piece_factorization_failures", static_cast<double>(piece_bad), 0.0, exact));
  r.checks.push_back(check_equal("helper_uniformity_failures", static_cast<double>(helper_bad), 0.0, exact));
  r.checks.push_back(check_equal("quantile_multiset_failures", static_cast<double>(quantile_bad), 0.0, exact));
  r.estimates["endpoint_cases"] = static_cast<double>(cases);
  r.estimates["piece_cases"] = static_cast<double>(piece_cases);
  r.estimates["vervaat_images"] = static_cast<double>(images);
  return r;
}

// --- 2: decomposition ------------------------------------------------------

inline ExperimentReport experiment_decomposition(const ExperimentConfig& cfg, double lambda = -1.0,
                                                 double weak_limit_lambda = -0.05) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 4096);
  detail::require_quarter_grid(n);
  if (!(lambda < 0.0) || !(weak_limit_lambda < 0.0)) throw std::invalid_argument("decomposition needs lambda < 0");
  ExperimentReport r;
  r.id = "decomposition";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"lambda", lambda}, {"weak_limit_lambda", weak_limit_lambda}, {"min_piece_fraction", 0.05}};

  struct Direct {
    double z;
    std::array<double, 3> marginal;
    double piece1_max, piece2_max;  // max / sqrt(length) of each piece
    double piece1_pit;              // excursion CDF of the rescaled midpoint of piece 1
  };
  const auto direct = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x21, i);
    const SampledPath v = sample_vervaat_bridge_direct(lambda, n, s);
    Direct d{};
    d.z = first_return_time(v, 0.0, 0.0).value_or(1.0);
    for (std::size_t k = 0; k < 3; ++k) d.marginal[k] = v[v.nearest_index(detail::kMarginalTimes[k])];
    const auto zi = static_cast<std::size_t>(std::llround(d.z * static_cast<double>(n)));
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j <= zi; ++j) m1 = std::max(m1, v[j]);
    for (std::size_t j = zi; j <= n; ++j) m2 = std::max(m2, v[j]);
    d.piece1_max = m1 / std::sqrt(d.z);
    d.piece2_max = d.z < 1.0 ? m2 / std::sqrt(1.0 - d.z) : 0.0;
    const std::size_t mid = zi / 2;
    d.piece1_pit = zi >= 2 ? excursion_marginal_cdf(static_cast<double>(mid) / static_cast<double>(zi),
                                                    v[mid] / std::sqrt(d.z))
                           : -1.0;
    return d;
  });
  const auto decomposed = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x22, i);
    const SampledPath v = sample_vervaat_bridge_decomposed(lambda, n, s).first;
    std::array<double, 3> m{};
    for (std::size_t k = 0; k < 3; ++k) m[k] = v[v.nearest_index(detail::kMarginalTimes[k])];
    return m;
  });

  const auto z = detail::column(direct, [](const Direct& d) { return d.z; });
  r.checks.push_back(check_below(
      "ks_first_return_vs_fz",
      detail::ks_grid_times(z, n, detail::CellEnd::right, [&](double t) { return cdf_Z(lambda, t); }),
      detail::ks_law_limit(thresholds::kKsLaw, z.size()), detail::lattice_note(thresholds::kKsLaw)));
  for (std::size_t k = 0; k < 3; ++k) {
    const auto a = detail::column(direct, [k](const Direct& d) { return d.marginal[k]; });
    const auto b = detail::column(decomposed, [k](const std::array<double, 3>& m) { return m[k]; });
    r.checks.push_back(check_below("ks_direct_vs_decomposed_t" + detail::fixed(detail::kMarginalTimes[k]),
                                   ks_two_sample(a, b), detail::ks_route_limit(a.size(), b.size()),
                                   detail::ks_note(thresholds::kKsRoute)));
  }

  // Conditional independence proxy: correlation of piece functionals within Z quartiles.
  std::vector<const Direct*> eligible;
  for (const auto& d : direct)
    if (d.z >= 0.05 && d.z <= 0.95) eligible.push_back(&d);
  std::vector<double> zs;
  for (const auto* d : eligible) zs.push_back(d->z);
  std::sort(zs.begin(), zs.end());
  for (std::size_t q = 0; q < 4 && zs.size() >= 16; ++q) {
    const double lo = zs[q * zs.size() / 4];
    const double hi = q == 3 ? 2.0 : zs[(q + 1) * zs.size() / 4];
    std::vector<double> f1, f2;
    for (const auto* d : eligible)
      if (d->z >= lo && d->z < hi) {
        f1.push_back(d->piece1_max);
        f2.push_back(d->piece2_max);
      }
    const double rho = pearson_correlation(f1, f2);
    r.checks.push_back(check_below("piece_correlation_z_bin" + std::to_string(q + 1),
                                   std::fabs(rho) / correlation_standard_error(f1.size()),
                                   thresholds::kCorrelationZ.value, thresholds::kCorrelationZ.derivation));
    r.estimates["piece_correlation_bin" + std::to_string(q + 1)] = rho;
  }

  std::vector<double> pit;
  for (const auto& d : direct)
    if (d.z >= 0.05 && d.piece1_pit >= 0.0) pit.push_back(d.piece1_pit);
  // carries the grid-minimum bias of the direct route at full strength; reported only
  r.estimates["ks_piece1_midpoint_vs_excursion"] =
      ks_one_sample(pit, [](double u) { return std::clamp(u, 0.0, 1.0); });

  // Weak limit: Z -> 1 as lambda -> 0, checked through E Z.
  Moments weak;
  double near_one = 0.0;
  for (std::size_t i = 0; i < cfg.reps; ++i) {
    RngStream s = detail::stream(cfg, 0x23, i);
    const double g = s.normal();
    const double zz = g * g / (weak_limit_lambda * weak_limit_lambda + g * g);
    weak.add(zz);
    near_one += zz > 0.9 ? 1.0 : 0.0;
  }
  r.checks.push_back(check_below("weak_limit_mean_z", z_score(weak, prob_above_drift(weak_limit_lambda)),
                                 thresholds::kMomentZ.value, thresholds::kMomentZ.derivation));
  r.estimates["weak_limit_fraction_z_above_0.9"] = near_one / static_cast<double>(cfg.reps);
  Moments zm;
  for (double x : z) zm.add(x);
  r.estimates["mean_first_return"] = zm.mean();
  r.estimates["mean_first_return_exact"] = prob_above_drift(lambda);
  r.estimates["piece1_midpoint_samples"] = static_cast<double>(pit.size());
  return r;
}

// --- 3: duality -------------------------------------------------------------

inline ExperimentReport experiment_duality(const ExperimentConfig& cfg, std::vector<double> lambdas = {0.5, 1.0, 2.0}) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 16384);
  detail::require_quarter_grid(n);
  ExperimentReport r;
  r.id = "duality";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"lambdas", lambdas}};
  struct Row {
    std::array<double, 3> reversed, direct;
    double last_hit;
  };
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    const double lambda = lambdas[li];
    if (!(lambda > 0.0)) throw std::invalid_argument("duality lambdas must be positive");
    const auto rows = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
      RngStream s1 = detail::stream(cfg, 0x31 + 2 * li, i);
      RngStream s2 = detail::stream(cfg, 0x32 + 2 * li, i);
      const SampledPath a = dual_reverse(sample_vervaat_bridge_direct(-lambda, n, s1), lambda);
      const SampledPath b = sample_vervaat_bridge_direct(lambda, n, s2);
      Row row{};
      for (std::size_t k = 0; k < 3; ++k) {
        row.reversed[k] = a[a.nearest_index(detail::kMarginalTimes[k])];
        row.direct[k] = b[b.nearest_index(detail::kMarginalTimes[k])];
      }
      row.last_hit = last_hit_time(b, lambda, 1.0).value_or(0.0);
      return row;
    });
    const std::string tag = "_lambda" + detail::fixed(lambda, 1);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto x = detail::column(rows, [k](const Row& w) { return w.reversed[k]; });
      const auto y = detail::column(rows, [k](const Row& w) { return w.direct[k]; });
      r.checks.push_back(check_below("ks_dual_t" + detail::fixed(detail::kMarginalTimes[k]) + tag, ks_two_sample(x, y),
                                     detail::ks_route_limit(x.size(), y.size()), detail::ks_note(thresholds::kKsRoute)));
    }
    const auto hits = detail::column(rows, [](const Row& w) { return w.last_hit; });
    r.checks.push_back(check_below(
        "ks_last_hit_vs_fzhat" + tag,
        detail::ks_grid_times(hits, n, detail::CellEnd::left, [&](double t) { return cdf_Zhat(lambda, t); }),
        detail::ks_law_limit(thresholds::kKsLaw, hits.size()), detail::lattice_note(thresholds::kKsLaw)));
  }
  return r;
}

// --- 4: Vervaat limit -------------------------------------------------------

inline ExperimentReport experiment_vervaat_limit(const ExperimentConfig& cfg) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 16384);
  detail::require_quarter_grid(n);
  // BES(3) marginals are exact at grid points, so the reference route needs no fine grid.
  constexpr std::size_t kReferenceGrid = 16;
  ExperimentReport r;
  r.id = "vervaat_limit";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"lambda", 0.0}, {"reference_grid", kReferenceGrid}};
  const auto vv = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x41, i);
    const SampledPath v = sample_vervaat_bridge_direct(0.0, n, s);
    std::array<double, 3> m{};
    for (std::size_t k = 0; k < 3; ++k) m[k] = v[v.nearest_index(detail::kMarginalTimes[k])];
    return m;
  });
  const auto bb = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x42, i);
    const SampledPath v = sample_bessel3_bridge(0.0, 0.0, 1.0, kReferenceGrid, s);
    std::array<double, 3> m{};
    for (std::size_t k = 0; k < 3; ++k) m[k] = v[v.nearest_index(detail::kMarginalTimes[k])];
    return m;
  });
  for (std::size_t k = 0; k < 3; ++k) {
    const double t = detail::kMarginalTimes[k];
    const auto a = detail::column(vv, [k](const std::array<double, 3>& m) { return m[k]; });
    const auto b = detail::column(bb, [k](const std::array<double, 3>& m) { return m[k]; });
    r.checks.push_back(check_below("ks_vervaat_vs_bessel3_t" + detail::fixed(t), ks_two_sample(a, b),
                                   detail::ks_route_limit(a.size(), b.size()), detail::ks_note(thresholds::kKsRoute)));
    auto cdf = [t](double x) { return excursion_marginal_cdf(t, x); };
    r.estimates["ks_vervaat_vs_excursion_law_t" + detail::fixed(t)] = ks_one_sample(a, cdf);
    r.estimates["ks_bessel3_vs_excursion_law_t" + detail::fixed(t)] = ks_one_sample(b, cdf);
  }
  return r;
}

// --- 5: Biane shift ---------------------------------------------------------

inline ExperimentReport experiment_biane_shift(const ExperimentConfig& cfg, double lambda = -1.0) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 1024);
  detail::require_quarter_grid(n);
  if (!(lambda < 0.0)) throw std::invalid_argument("biane shift needs lambda < 0");
  ExperimentReport r;
  r.id = "biane_shift";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"lambda", lambda}, {"weak_limit_lambda", 0.0}};
  struct Row {
    std::array<double, 3> marginal;
    double a;          // U Z with the exact Z
    double min_index;  // (N - argmin) mod N, the grid image of 1 - argmin
    bool min_matches;  // argmin == N - shift index (mod N)
  };
  auto shifted_row = [&](const SampledPath& v, std::size_t shift, double a) {
    const SampledPath b = shift_cyclic(v, static_cast<double>(shift) / static_cast<double>(n));
    Row row{};
    for (std::size_t k = 0; k < 3; ++k) row.marginal[k] = b[b.nearest_index(detail::kMarginalTimes[k])];
    const std::size_t m = argmin_first(b).value;
    row.a = a;
    row.min_index = static_cast<double>((n - m) % n);
    row.min_matches = (m + shift) % n == 0;
    return row;
  };
  const auto drift_rows = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x51, i);
    auto [v, rec] = sample_vervaat_bridge_decomposed(lambda, n, s);
    const double u = s.uniform();
    const auto shift = std::min(static_cast<std::size_t>(u * static_cast<double>(rec.split.value)), rec.split.value - 1);
    return shifted_row(v, shift, u * rec.z);
  });
  const auto zero_rows = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x52, i);
    const SampledPath e = sample_excursion(1.0, n, s);
    const double u = s.uniform();
    const auto shift = std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
    return shifted_row(e, shift, u);
  });
  auto add_checks = [&](const std::vector<Row>& rows, double lam, const std::string& tag) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double t = detail::kMarginalTimes[k];
      const auto x = detail::column(rows, [k](const Row& w) { return w.marginal[k]; });
      r.checks.push_back(check_below("ks_shifted_vs_bridge_t" + detail::fixed(t) + tag,
                                     ks_one_sample(x, [&](double y) { return detail::normal_bridge_cdf(lam, t, y); }),
                                     detail::ks_law_limit(thresholds::kKsLaw, x.size()),
                                     detail::ks_note(thresholds::kKsLaw)));
    }
    double mismatches = 0.0;
    for (const auto& w : rows) mismatches += w.min_matches ? 0.0 : 1.0;
    r.checks.push_back(check_equal("argmin_not_at_one_minus_shift" + tag, mismatches, 0.0,
                                   "pathwise: the shifted path attains its minimum at 1 - A"));
    // 1 - argmin lives on the lattice {k/N}; its law there is that of floor(U M)/N,
    // which tends to the law of A. The continuous law is checked on exact U Z below.
    const auto loc = detail::column(rows, [](const Row& w) { return w.min_index; });
    const std::vector<double> cum = detail::shift_index_cdf(lam, n);
    auto lattice_cdf = [&](double k) {
      if (k < 0.0) return 0.0;
      return k >= static_cast<double>(n - 1) ? 1.0 : cum[static_cast<std::size_t>(k)];
    };
    auto lattice_cdf_left = [&](double k) { return lattice_cdf(std::ceil(k) - 1.0); };
    r.checks.push_back(check_below("ks_one_minus_argmin_vs_lattice_a_law" + tag,
                                   ks_one_sample(loc, lattice_cdf, lattice_cdf_left),
                                   detail::ks_law_limit(thresholds::kKsLaw, loc.size()),
                                   detail::ks_note(thresholds::kKsLaw)));
    auto cdf = [&](double a) { return lam == 0.0 ? std::clamp(a, 0.0, 1.0) : cdf_A(lam, a); };
    if (lam != 0.0) {
      const auto a = detail::column(rows, [](const Row& w) { return w.a; });
      r.checks.push_back(check_below("ks_uz_vs_a_law" + tag, ks_one_sample(a, cdf),
                                     detail::ks_law_limit(thresholds::kKsLaw, a.size()),
                                     "exact draws of U Z against the closed-form law of A"));
    }
  };
  add_checks(drift_rows, lambda, "_lambda" + detail::fixed(lambda, 1));
  add_checks(zero_rows, 0.0, "_lambda0.0");
  return r;
}

// --- 6: moments of V(B) -----------------------------------------------------

inline ExperimentReport experiment_moments_vb(const ExperimentConfig& cfg) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 4000);
  if (n % 10 != 0) throw std::invalid_argument("moments grid must be a multiple of 10");
  ExperimentReport r;
  r.id = "moments_vb";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"gated_route", "denisov"}, {"diagnostic_route", "direct"}};
  using Row = std::array<double, 10>;  // values at t = 0.1, ..., 0.9 and 1
  auto collect = [&](const SampledPath& v) {
    Row row{};
    for (std::size_t k = 0; k < 10; ++k) row[k] = v[(k + 1) * n / 10];
    return row;
  };
  const auto den = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x61, i);
    return collect(sample_meander_pair_denisov(n, s).first);
  });
  const auto dir = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x62, i);
    return collect(vervaat_grid(sample_bm(n, s)));
  });
  for (std::size_t k = 0; k < 9; ++k) {
    const double t = static_cast<double>(k + 1) / 10.0;
    Moments m1, m2, d1, d2;
    for (const auto& row : den) {
      m1.add(row[k]);
      m2.add(row[k] * row[k]);
    }
    for (const auto& row : dir) {
      d1.add(row[k]);
      d2.add(row[k] * row[k]);
    }
    const std::string tt = detail::fixed(t, 1);
    r.checks.push_back(check_below("mean_z_t" + tt, z_score(m1, mean_VB(t)), thresholds::kMomentZ.value,
                                   thresholds::kMomentZ.derivation));
    r.checks.push_back(check_below("second_moment_z_t" + tt, z_score(m2, second_moment_VB(t)),
                                   thresholds::kMomentZ.value, thresholds::kMomentZ.derivation));
    r.estimates["mean_t" + tt] = m1.mean();
    r.estimates["mean_exact_t" + tt] = mean_VB(t);
    r.estimates["direct_mean_z_t" + tt] = z_score(d1, mean_VB(t));
    r.estimates["direct_second_moment_z_t" + tt] = z_score(d2, second_moment_VB(t));
  }
  Moments v1;
  for (const auto& row : den) v1.add(row[9] * row[9]);
  r.checks.push_back(check_below("terminal_variance_z", z_score(v1, 1.0), thresholds::kMomentZ.value,
                                 "E V(B)_1^2 = E B_1^2 = 1, |mean - 1| / SE"));
  const auto a = detail::column(den, [](const Row& w) { return w[4]; });
  const auto b = detail::column(dir, [](const Row& w) { return w[4]; });
  r.estimates["ks_route_agreement_t0.5"] = ks_two_sample(a, b);
  return r;
}

// --- 7: meander moments -----------------------------------------------------

inline ExperimentReport experiment_meander_moments(const ExperimentConfig& cfg) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 256);
  detail::require_quarter_grid(n);
  ExperimentReport r;
  r.id = "meander_moments";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"times", std::vector<double>(detail::kMarginalTimes.begin(), detail::kMarginalTimes.end())}};
  const auto rows = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x71, i);
    const SampledPath p = sample_meander(n, s);
    return std::array<double, 4>{p[n / 4], p[n / 2], p[3 * n / 4], p[n]};
  });
  for (std::size_t k = 0; k < 3; ++k) {
    const double t = detail::kMarginalTimes[k];
    Moments m1, m2, cross;
    for (const auto& w : rows) {
      m1.add(w[k]);
      m2.add(w[k] * w[k]);
      cross.add(w[k] * w[3]);
    }
    const std::string tt = detail::fixed(t);
    r.checks.push_back(check_below("mean_z_t" + tt, z_score(m1, meander_mean(t)), thresholds::kMomentZ.value,
                                   thresholds::kMomentZ.derivation));
    r.checks.push_back(check_below("second_moment_z_t" + tt, z_score(m2, meander_m2(t)), thresholds::kMomentZ.value,
                                   thresholds::kMomentZ.derivation));
    r.checks.push_back(check_below("cross_moment_z_t" + tt, z_score(cross, meander_cross(t)),
                                   thresholds::kMomentZ.value, thresholds::kMomentZ.derivation));
    // closed forms against quadrature of the marginal and joint densities
    const double q1 = integrate_to_infinity([&](double x) { return x * meander_marginal(t, x); }, 0.0).value;
    const double q2 = integrate_to_infinity([&](double x) { return x * x * meander_marginal(t, x); }, 0.0).value;
    const double q3 = integrate_to_infinity(
                          [&](double x) {
                            return x * integrate_to_infinity([&](double y) { return y * meander_joint(t, x, y); }, 0.0,
                                                             1e-12, 1e-10)
                                           .value;
                          },
                          0.0, 1e-11, 1e-9)
                          .value;
    const double gap = std::max({std::fabs(q1 - meander_mean(t)), std::fabs(q2 - meander_m2(t)),
                                 std::fabs(q3 - meander_cross(t))});
    r.checks.push_back(check_below("quadrature_gap_t" + tt, gap, 1e-7,
                                   "closed-form moments vs quadrature of the meander densities"));
  }
  Moments end1, end2;
  for (const auto& w : rows) {
    end1.add(w[3]);
    end2.add(w[3] * w[3]);
  }
  r.checks.push_back(check_below("terminal_second_moment_z", z_score(end2, 2.0), thresholds::kMomentZ.value,
                                 "Rayleigh endpoint: E rho^2 = 2"));
  r.checks.push_back(check_below("terminal_mean_z", z_score(end1, std::sqrt(std::numbers::pi / 2.0)),
                                 thresholds::kMomentZ.value, "Rayleigh endpoint: E rho = sqrt(pi/2)"));
  return r;
}

// --- 8: staying above the drift line ---------------------------------------

inline ExperimentReport experiment_above_drift(const ExperimentConfig& cfg, double lambda = -1.0,
                                               std::size_t excursion_grid = 16384) {
  detail::require_reps(cfg.reps);
  // about a third of the paths survive the conditioning
  if (cfg.reps < 1000) throw std::invalid_argument("above-drift experiment needs at least 1000 replicates");
  const std::size_t n = detail::grid_or(cfg, 4096);
  if (!(lambda < 0.0)) throw std::invalid_argument("above-drift experiment needs lambda < 0");
  ExperimentReport r;
  r.id = "above_drift";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"lambda", lambda}, {"chord_level", lambda / 2.0}, {"excursion_grid", excursion_grid}};
  struct Row {
    bool above;
    double z;
  };
  const auto rows = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x81, i);
    const SampledPath v = sample_vervaat_bridge_direct(lambda, n, s);
    bool above = true;
    for (std::size_t j = 1; j < n && above; ++j) above = v[j] > lambda * v.time(j);
    return Row{above, first_return_time(v, 0.0, 0.0).value_or(1.0)};
  });
  Moments freq;
  std::vector<double> conditioned;
  for (const auto& w : rows) {
    freq.add(w.above ? 1.0 : 0.0);
    if (w.above) conditioned.push_back(w.z);
  }
  r.checks.push_back(check_below("above_frequency_z", z_score(freq, prob_above_drift(lambda)), thresholds::kMomentZ.value,
                                 thresholds::kMomentZ.derivation));
  r.estimates["above_frequency"] = freq.mean();
  r.estimates["above_probability_exact"] = prob_above_drift(lambda);
  const TabulatedCdf cond([&](double t) { return f_Z_conditioned(lambda, t); }, 0.0, 1.0, 2000);
  r.checks.push_back(check_below("ks_conditioned_first_return",
                                 detail::ks_grid_times(conditioned, n, detail::CellEnd::right, std::cref(cond)),
                                 detail::ks_law_limit(thresholds::kKsConditioned, conditioned.size()),
                                 detail::lattice_note(thresholds::kKsConditioned)));
  r.estimates["conditioned_samples"] = static_cast<double>(conditioned.size());

  /*
   * Chord test on first passage bridges: P(F_t > x - (x - lambda) t on (0,1)) = x / lambda.
   * Grid monitoring misses crossings between grid points, so it overestimates
   * the probability; the 1-d Brownian bridge crossing factor prod (1 - e^{-2ab/dt})
   * ignores the upward BES(3) drift and underestimates it. The exact value must
   * lie between the two.
   */
  const double x = lambda / 2.0;
  struct Chord {
    double monitored, bridge_corrected, flat;
  };
  const auto chord = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x82, i);
    const SampledPath f = sample_fpb(lambda, 1.0, n, s);
    Chord c{1.0, 1.0, 1.0};
    auto gap = [&](std::size_t j) { return f[j] - (x - (x - lambda) * f.time(j)); };
    for (std::size_t j = 1; j < n; ++j) {
      if (!(gap(j) > 0.0)) c.monitored = 0.0;
      if (!(f[j] > lambda)) c.flat = 0.0;
    }
    // the last cell ends on the chord itself and carries no crossing factor
    for (std::size_t j = 0; j + 1 < n && c.bridge_corrected > 0.0; ++j) {
      const double a = gap(j), b = gap(j + 1);
      c.bridge_corrected = (a > 0.0 && b > 0.0) ? c.bridge_corrected * -std::expm1(-2.0 * a * b / f.dt()) : 0.0;
    }
    return c;
  });
  Moments upper, lower;
  double flat = 0.0;
  for (const auto& c : chord) {
    upper.add(c.monitored);
    lower.add(c.bridge_corrected);
    flat += c.flat;
  }
  const double target = x / lambda;
  r.checks.push_back(check_below("chord_upper_bound_z", (target - upper.mean()) / upper.standard_error(),
                                 thresholds::kMomentZ.value, "x/lambda <= monitored frequency + 3 SE"));
  r.checks.push_back(check_below("chord_lower_bound_z", (lower.mean() - target) / lower.standard_error(),
                                 thresholds::kMomentZ.value, "bridge-corrected estimate - 3 SE <= x/lambda"));
  r.checks.push_back(check_equal("flat_chord_frequency", flat / static_cast<double>(cfg.reps), 1.0,
                                 "x = lambda: the path stays above lambda before its end"));
  r.estimates["chord_monitored_frequency"] = upper.mean();
  r.estimates["chord_bridge_corrected"] = lower.mean();
  r.estimates["chord_probability_exact"] = target;

  const auto h = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0x83, i);
    return first_return_time(sample_drifting_excursion(lambda, excursion_grid, s), 0.0, 0.0).value_or(1.0);
  });
  r.checks.push_back(check_below(
      "ks_drifting_excursion_h_vs_fz",
      detail::ks_grid_times(h, excursion_grid, detail::CellEnd::right, [&](double t) { return cdf_Z(lambda, t); }),
      detail::ks_law_limit(thresholds::kKsLaw, h.size()), detail::lattice_note(thresholds::kKsLaw)));
  return r;
}

// --- 9: convex minorant -----------------------------------------------------

inline ExperimentReport experiment_convex_minorant(const ExperimentConfig& cfg, double lambda = -1.0) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 4096);
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("minorant grid must be even");
  if (!(lambda < 0.0)) throw std::invalid_argument("minorant experiment needs lambda < 0");
  ExperimentReport r;
  r.id = "convex_minorant";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  r.parameters = {{"lambda", lambda}, {"coarse_grid", n / 2}};
  struct Row {
    double slope;
    std::size_t segments;
    bool first_vertex_after_return;
  };
  auto row_for = [&](std::size_t grid, std::uint64_t tag, std::size_t i) {
    RngStream s = detail::stream(cfg, tag, i);
    const SampledPath v = sample_vervaat_bridge_direct(lambda, grid, s);
    const MinorantResult m = convex_minorant(v);
    double slope = m.slopes.back();
    // the chord slope is lambda exactly; rounding in the hull can move it by an ulp
    if (std::fabs(slope - lambda) <= 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(lambda)) slope = lambda;
    const double z = first_return_time(v, 0.0, 0.0).value_or(1.0);
    return Row{slope, m.segment_count(), v.time(m.vertices[1]) >= z};
  };
  const auto fine = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) { return row_for(n, 0x91, i); });
  const auto coarse = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) { return row_for(n / 2, 0x92, i); });
  const auto slopes = detail::column(fine, [](const Row& w) { return w.slope; });
  auto cdf = [&](double a) { return a < lambda ? 0.0 : (a >= 0.0 ? 1.0 : slope_last_segment_cdf(lambda, a)); };
  auto cdf_left = [&](double a) { return a <= lambda ? 0.0 : (a > 0.0 ? 1.0 : slope_last_segment_cdf(lambda, a)); };
  r.checks.push_back(check_below("ks_last_slope", ks_one_sample(slopes, cdf, cdf_left),
                                 detail::ks_law_limit(thresholds::kKsSlope, slopes.size()),
                                 detail::ks_note(thresholds::kKsSlope)));
  std::vector<std::size_t> cf, cc;
  double after = 0.0;
  for (const auto& w : fine) {
    cf.push_back(w.segments);
    after += w.first_vertex_after_return ? 1.0 : 0.0;
  }
  for (const auto& w : coarse) cc.push_back(w.segments);
  const SegmentCountStats sf = segment_count_stats(cf), sc = segment_count_stats(cc);
  const double se = std::hypot(sf.moments.standard_error(), sc.moments.standard_error());
  r.checks.push_back(check_below("segment_count_shift_z", std::fabs(sf.moments.mean() - sc.moments.mean()) / se,
                                 thresholds::kSegmentShiftZ.value, thresholds::kSegmentShiftZ.derivation));
  r.estimates["mean_segments"] = sf.moments.mean();
  r.estimates["mean_segments_coarse"] = sc.moments.mean();
  r.estimates["mean_segments_se"] = sf.moments.standard_error();
  r.estimates["max_segments"] = static_cast<double>(sf.histogram.rbegin()->first);
  r.estimates["fraction_first_vertex_after_first_return"] = after / static_cast<double>(fine.size());
  return r;
}

// --- 10: non-Markov witnesses -----------------------------------------------

namespace detail {

// Exact laws of the first hit of -1 after t0 by V(w), w uniform bridge 0 -> a,
// given V(t0) = x0 and either an earlier hit of -1 (i) or none (ii).
struct DiscreteNonMarkov {
  std::map<int, Rational> after_zero, positive;
  bool differ = false;
  bool ratio_linear = false;  // positive(j) / (j after_zero(j)) constant on the common support
};

inline DiscreteNonMarkov discrete_non_markov(int n, int a, int t0, int x0) {
  std::map<int, BigInt> c1, c2;
  BigInt n1 = 0, n2 = 0;
  for_each_bridge(n, a, [&](const LatticeWalk& w) {
    const LatticeWalk v = vervaat_discrete(w).walk;
    if (v[static_cast<std::size_t>(t0)] != x0) return;
    const int z = vervaat_first_return(v);
    const auto hit = first_hit(v, -1, static_cast<std::size_t>(t0));
    if (!hit) return;
    const int j = static_cast<int>(*hit);
    if (z < t0) {
      ++c1[j];
      ++n1;
    } else {
      ++c2[j];
      ++n2;
    }
  });
  DiscreteNonMarkov out;
  if (n1 == 0 || n2 == 0) return out;
  for (const auto& [j, c] : c1) out.after_zero[j] = Rational(c, n1);
  for (const auto& [j, c] : c2) out.positive[j] = Rational(c, n2);
  out.differ = out.after_zero != out.positive;
  bool linear = out.after_zero.size() == out.positive.size();
  std::optional<Rational> ratio;
  for (const auto& [j, p] : out.after_zero) {
    if (!linear) break;
    const auto it = out.positive.find(j);
    if (it == out.positive.end()) {
      linear = false;
      break;
    }
    const Rational q = it->second / (p * j);
    if (ratio && *ratio != q) linear = false;
    ratio = q;
  }
  out.ratio_linear = linear;
  return out;
}

}  // namespace detail

inline ExperimentReport experiment_non_markov(const ExperimentConfig& cfg, double lambda = -1.0, double t0 = 0.3,
                                              double x0 = 0.5) {
  detail::require_reps(cfg.reps);
  const std::size_t n = detail::grid_or(cfg, 2048);
  ExperimentReport r;
  r.id = "non_markov";
  r.seed = cfg.seed;
  r.grid = n;
  r.replicates = cfg.reps;
  constexpr int kDiscreteA = -2, kDiscreteT0 = 6, kDiscreteX0 = 2;
  r.parameters = {{"lambda", lambda},
                  {"t0", t0},
                  {"x0", x0},
                  {"discrete", {{"n", {16, 20}}, {"a", kDiscreteA}, {"t0", kDiscreteT0}, {"x0", kDiscreteX0}}},
                  {"bins", 10},
                  {"weighted_draws", 10 * cfg.reps}};

  for (int dn : {16, 20}) {
    const auto d = detail::discrete_non_markov(dn, kDiscreteA, kDiscreteT0, kDiscreteX0);
    const std::string tag = "_n" + std::to_string(dn);
    r.checks.push_back(check_equal("discrete_laws_differ" + tag, d.differ ? 1.0 : 0.0, 1.0,
                                   "exact rational comparison of the two conditional laws"));
    r.checks.push_back(check_equal("discrete_ratio_proportional_to_time" + tag, d.ratio_linear ? 1.0 : 0.0, 1.0,
                                   "exact: P_positive(j) / (j P_after_zero(j)) is constant"));
  }

  // terminal sign of V(w) for walks: an early hit of -1 forces w_n < 0
  {
    constexpr int kWalkN = 16;
    BigInt early = 0, early_positive = 0, clear = 0, clear_positive = 0;
    for_each_walk(kWalkN, [&](const LatticeWalk& w) {
      const LatticeWalk v = vervaat_discrete(w).walk;
      bool hit = false;
      for (std::size_t j = 1; j <= kWalkN / 4; ++j) hit = hit || v[j] < 0;
      const bool positive = v[kWalkN] > 0;
      if (hit) {
        ++early;
        if (positive) ++early_positive;
      } else {
        ++clear;
        if (positive) ++clear_positive;
      }
    });
    r.checks.push_back(check_equal("discrete_terminal_positive_after_early_zero",
                                   static_cast<double>(early_positive), 0.0, "path logic: exact count over all walks"));
    r.estimates["discrete_terminal_positive_given_clear"] =
        Rational(clear_positive, clear).convert_to<double>();
  }

  // grid version of the same statement for V(B)
  struct Terminal {
    int early;  // 1 if V <= 0 somewhere on (0, 1/4]
    bool positive;
  };
  const std::size_t nq = std::max<std::size_t>(4, n / 4 * 4);
  const auto term = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0xA1, i);
    const SampledPath v = vervaat_grid(sample_bm(nq, s));
    int early = 0;
    for (std::size_t j = 1; j <= nq / 4 && !early; ++j) early = v[j] <= 0.0;
    return Terminal{early, v[nq] > 0.0};
  });
  double early = 0.0, early_pos = 0.0, clear = 0.0, clear_pos = 0.0;
  for (const auto& t : term) {
    if (t.early) {
      early += 1.0;
      early_pos += t.positive ? 1.0 : 0.0;
    } else {
      clear += 1.0;
      clear_pos += t.positive ? 1.0 : 0.0;
    }
  }
  r.checks.push_back(check_equal("terminal_positive_after_early_zero", early_pos, 0.0,
                                 "path logic: an early zero forces V_1 <= 0"));
  r.checks.push_back(check_at_least("terminal_positive_given_positivity", clear > 0.0 ? clear_pos / clear : 0.0,
                                    thresholds::kPositiveTerminal.value, thresholds::kPositiveTerminal.derivation));
  r.estimates["early_zero_fraction"] = early / static_cast<double>(cfg.reps);

  // continuous ratio regression
  const NonMarkovDensities dens = nonmarkov_densities(lambda, t0, x0);
  const std::vector<double> t_after = run_replicates(cfg.reps, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0xA2, i);
    const SampledPath f = sample_fpb(lambda - x0, 1.0 - t0, n, s);
    return t0 + detail::first_time_below_bridge_corrected(f, -x0, s);
  });
  const std::size_t draws = 10 * cfg.reps;
  struct Weighted {
    double t, w;
  };
  const auto weighted = run_replicates(draws, cfg.workers, [&](std::size_t i) {
    RngStream s = detail::stream(cfg, 0xA3, i);
    const double g = s.normal();
    const double z = g * g / (lambda * lambda + g * g);
    return Weighted{z, z > t0 ? excursion_marginal_density(t0, x0, z) : 0.0};
  });
  constexpr std::size_t kBins = 10;
  std::vector<double> sorted = t_after;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges{t0};
  for (std::size_t b = 1; b < kBins; ++b) edges.push_back(sorted[b * sorted.size() / kBins]);
  edges.push_back(2.0);
  auto bin_of = [&](double t) {
    return static_cast<std::size_t>(std::upper_bound(edges.begin() + 1, edges.end() - 1, t) - edges.begin() - 1);
  };
  std::vector<double> c1(kBins, 0.0), s1(kBins, 0.0), w2(kBins, 0.0);
  for (double t : t_after) {
    const std::size_t b = bin_of(t);
    c1[b] += 1.0;
    s1[b] += t;
  }
  double wsum = 0.0;
  for (const auto& w : weighted) {
    if (w.w <= 0.0) continue;
    w2[bin_of(w.t)] += w.w;
    wsum += w.w;
  }
  std::vector<double> xs, ys;
  for (std::size_t b = 0; b < kBins; ++b) {
    if (c1[b] == 0.0 || w2[b] == 0.0) continue;
    xs.push_back(s1[b] / c1[b]);
    ys.push_back((w2[b] / wsum) / (c1[b] / static_cast<double>(t_after.size())));
  }
  const OriginFit fit = xs.size() >= 2 ? fit_through_origin(xs, ys) : OriginFit{};
  r.checks.push_back(check_at_least("ratio_regression_r2", fit.r_squared, thresholds::kRatioR2.value,
                                    thresholds::kRatioR2.derivation));
  r.estimates["ratio_slope"] = fit.slope;
  r.estimates["ratio_slope_exact"] = dens.c2 / dens.c1;
  r.estimates["ks_after_zero_vs_f1"] =
      ks_one_sample(t_after, [&](double t) {
        return t <= t0 ? 0.0 : (t >= 1.0 ? 1.0 : integrate([&](double s) { return dens.f1(s); }, t0, t, 1e-14, 1e-10).value);
      });
  r.estimates["total_variation_f1_f2"] = dens.total_variation();
  return r;
}

// --- 11: local limit --------------------------------------------------------

inline ExperimentReport experiment_local_limit(const ExperimentConfig& cfg, double lambda = -1.0,
                                               std::vector<int> sizes = {200, 800, 3200}) {
  if (!(lambda < 0.0)) throw std::invalid_argument("local limit needs lambda < 0");
  ExperimentReport r;
  r.id = "local_limit";
  r.seed = cfg.seed;
  r.parameters = {{"lambda", lambda}, {"sizes", sizes}, {"endpoint_rule", "a = -(nearest integer to |lambda| sqrt(n) with the parity of n)"}};
  auto depth_for = [&](int n) {
    // a has the parity of n and a / sqrt(n) is as close to lambda as the lattice allows
    const double target = -lambda * std::sqrt(static_cast<double>(n));
    int depth = static_cast<int>(std::lround(target));
    if ((n + depth) % 2 != 0) depth += target > depth ? 1 : -1;
    return std::max(depth, n % 2 == 0 ? 2 : 1);
  };
  std::vector<double> tvs;
  for (int n : sizes) {
    const int depth = depth_for(n);
    const double lam_n = -static_cast<double>(depth) / std::sqrt(static_cast<double>(n));
    const auto pmf = z_pmf_real(n, -depth);
    double tv = 0.0, covered = 0.0;
    for (const auto& [l, p] : pmf) {
      const double lo = static_cast<double>(l - 1) / n, hi = static_cast<double>(l + 1) / n;
      const double q = cdf_Z(lam_n, std::min(hi, 1.0)) - cdf_Z(lam_n, lo);
      tv += std::fabs(p - q);
      covered += q;
    }
    tv = 0.5 * (tv + std::max(0.0, 1.0 - covered));
    tvs.push_back(tv);
    r.estimates["tv_n" + std::to_string(n)] = tv;
    r.estimates["lambda_n" + std::to_string(n)] = lam_n;
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < tvs.size(); ++i) decreasing = decreasing && tvs[i] < tvs[i - 1];
  r.checks.push_back(check_equal("tv_decreasing", decreasing ? 1.0 : 0.0, 1.0, "TV strictly decreasing in n"));
  r.checks.push_back(check_below("tv_largest_n", tvs.back(), thresholds::kLocalLimitTv.value,
                                 thresholds::kLocalLimitTv.derivation));
  const Rational total = z_pmf(sizes.front(), -depth_for(sizes.front())).total();
  r.checks.push_back(check_equal("exact_pmf_total_is_one", total == 1 ? 1.0 : 0.0, 1.0, "exact rational sum"));
  return r;
}

// --- registry ---------------------------------------------------------------

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"discrete_exact", "decomposition",   "duality",        "vervaat_limit",
                                            "biane_shift",    "moments_vb",      "meander_moments", "above_drift",
                                            "convex_minorant", "non_markov",     "local_limit"};
  return ids;
}

inline ExperimentReport run_experiment(const std::string& id, const ExperimentConfig& cfg) {
  static const std::map<std::string, std::function<ExperimentReport(const ExperimentConfig&)>> table{
      {"discrete_exact", [](const ExperimentConfig& c) { return experiment_discrete_exact(c); }},
      {"decomposition", [](const ExperimentConfig& c) { return experiment_decomposition(c); }},
      {"duality", [](const ExperimentConfig& c) { return experiment_duality(c); }},
      {"vervaat_limit", [](const ExperimentConfig& c) { return experiment_vervaat_limit(c); }},
      {"biane_shift", [](const ExperimentConfig& c) { return experiment_biane_shift(c); }},
      {"moments_vb", [](const ExperimentConfig& c) { return experiment_moments_vb(c); }},
      {"meander_moments", [](const ExperimentConfig& c) { return experiment_meander_moments(c); }},
      {"above_drift", [](const ExperimentConfig& c) { return experiment_above_drift(c); }},
      {"convex_minorant", [](const ExperimentConfig& c) { return experiment_convex_minorant(c); }},
      {"non_markov", [](const ExperimentConfig& c) { return experiment_non_markov(c); }},
      {"local_limit", [](const ExperimentConfig& c) { return experiment_local_limit(c); }},
  };
  const auto it = table.find(id);
  if (it == table.end()) throw std::invalid_argument("unknown experiment '" + id + "'");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report = it->second(cfg);
  if (cfg.timing)
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace vervaat

#endif  // VERVAAT_EXPERIMENTS_HPP_
