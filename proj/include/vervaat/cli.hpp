#ifndef VERVAAT_CLI_HPP_
#define VERVAAT_CLI_HPP_

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vervaat/closed_forms.hpp"
#include "vervaat/convex_minorant.hpp"
#include "vervaat/experiments.hpp"
#include "vervaat/lattice.hpp"
#include "vervaat/parallel.hpp"
#include "vervaat/path_io.hpp"
#include "vervaat/samplers.hpp"

namespace vervaat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr std::uint64_t kDefaultSeed = 7;
inline constexpr std::uint64_t kSampleStreamTag = 0x100;

/// Provenance echoed into JSON output.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> parameters;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  std::size_t reps = 0;
  std::size_t grid = 0;

  Json to_json() const {
    return {{"subcommand", subcommand}, {"parameters", parameters}, {"seed", seed},
            {"output", output},         {"reps", reps},             {"grid", grid}};
  }
};

namespace detail {

// --seed wins, then VERVAAT_SEED, then the default.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("VERVAAT_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::char_traits<char>::length(env)) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("VERVAAT_SEED is not an unsigned integer: '") + env + "'");
  }
  return kDefaultSeed;
}

inline std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

inline std::map<std::string, double> parse_params(const std::string& s) {
  std::map<std::string, double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("parameters are key=value pairs, got '" + item + "'");
    out[item.substr(0, eq)] = parse_real(std::string_view(item).substr(eq + 1));
  }
  return out;
}

// Writes to --out if given, else to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::vector<SampledPath> sample_ensemble(const SamplerSpec& spec, std::size_t reps, std::uint64_t seed,
                                                unsigned workers) {
  auto drawn = run_replicates(reps, workers, [&](std::size_t i) {
    RngStream s(seed, stream_id_for(kSampleStreamTag, i));
    return std::optional<SampledPath>(sample(spec, s));
  });
  std::vector<SampledPath> out;
  out.reserve(drawn.size());
  for (auto& p : drawn) out.push_back(std::move(*p));
  return out;
}

}  // namespace detail

/*
 * Entry point of the `vervaat` tool. Returns 0 on success (or all experiments
 * passing), 1 if an experiment fails, 2 on usage or argument errors.
 */
inline int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vervaat transforms of Brownian motion and bridges: exact lattice checks, samplers, closed forms."};
  app.require_subcommand(1);
  app.footer(
      "Outputs:\n"
      "  enumerate  JSON {n, a, pmf: [{l, num, den}], bijection_ok, uniform_helper_ok, factorization_ok}\n"
      "  sample     CSV blocks 't,value' (one per path), or with --marginals 'replicate,<t1>,<t2>,...'\n"
      "  density    CSV 'x,density,cdf'\n"
      "  minorant   JSON {paths: [{n_segments, slopes, vertices}]} or {histogram, mean, standard_error}\n"
      "  verify     JSON {schema, reports: [...], passed}\n"
      "Seed: --seed, else VERVAAT_SEED, else 7.");

  std::optional<std::uint64_t> seed_flag;
  std::string out_path;
  unsigned workers = default_workers();

  // enumerate
  auto* en = app.add_subcommand("enumerate", "exact law of Z and structural checks over all lattice bridges");
  int en_n = 0, en_a = 0;
  en->add_option("--n", en_n, "walk length")->required();
  en->add_option("--a", en_a, "bridge endpoint (negative, same parity as n)")->required()->allow_extra_args(false);
  en->add_option("--out", out_path, "output file (default stdout)");

  // sample
  auto* sa = app.add_subcommand("sample", "sample paths of one process");
  std::string sa_process = "bm", sa_marginals;
  double sa_lambda = 0.0, sa_duration = 1.0;
  std::size_t sa_grid = 1024, sa_reps = 1;
  sa->add_option("--process", sa_process, "process name")
      ->check(CLI::IsMember([] {
        std::vector<std::string> v;
        for (const auto& [k, p] : process_names()) v.push_back(k);
        return v;
      }()));
  sa->add_option("--lambda", sa_lambda, "endpoint or drift parameter");
  sa->add_option("--duration", sa_duration, "path length");
  sa->add_option("--grid", sa_grid, "grid cells N");
  sa->add_option("--reps", sa_reps, "number of paths");
  sa->add_option("--seed", seed_flag, "master seed");
  sa->add_option("--out", out_path, "output file (default stdout)");
  sa->add_option("--marginals", sa_marginals, "comma separated times; one row per replicate");
  sa->add_option("--workers", workers, "worker threads (output does not depend on it)");

  // density
  auto* de = app.add_subcommand("density", "tabulate a closed-form density and its distribution function");
  std::string de_family, de_params;
  std::optional<double> de_lambda;
  std::size_t de_grid = 101;
  de->add_option("--family", de_family, "density family")->required()->check(CLI::IsMember(density_families()));
  de->add_option("--params", de_params, "key=value list, e.g. lambda=-1,t=0.5");
  de->add_option("--lambda", de_lambda, "shorthand for lambda=...");
  de->add_option("--grid", de_grid, "number of rows, endpoints included");
  de->add_option("--out", out_path, "output file (default stdout)");

  // minorant
  auto* mi = app.add_subcommand("minorant", "convex minorants of sampled or supplied paths");
  std::string mi_process = "vervaat-direct", mi_in;
  double mi_lambda = -1.0;
  std::size_t mi_grid = 1024, mi_reps = 1;
  bool mi_aggregate = false;
  mi->add_option("--process", mi_process, "process name")
      ->check(CLI::IsMember([] {
        std::vector<std::string> v;
        for (const auto& [k, p] : process_names()) v.push_back(k);
        return v;
      }()));
  mi->add_option("--lambda", mi_lambda, "endpoint parameter");
  mi->add_option("--grid", mi_grid, "grid cells N");
  mi->add_option("--reps", mi_reps, "number of paths");
  mi->add_option("--seed", seed_flag, "master seed");
  mi->add_option("--in", mi_in, "read paths from a CSV written by `sample` instead of sampling");
  mi->add_flag("--aggregate", mi_aggregate, "emit the segment count histogram only");
  mi->add_option("--out", out_path, "output file (default stdout)");
  mi->add_option("--workers", workers, "worker threads (output does not depend on it)");

  // verify
  auto* ve = app.add_subcommand("verify", "run named experiments and report pass/fail");
  std::string ve_experiment = "all";
  std::size_t ve_reps = 100000, ve_grid = 0;
  bool ve_timing = false;
  ve->add_option("--experiment", ve_experiment, "experiment id or 'all'")->check(CLI::IsMember([] {
    auto v = experiment_ids();
    v.push_back("all");
    return v;
  }()));
  ve->add_option("--seed", seed_flag, "master seed");
  ve->add_option("--reps", ve_reps, "replicates per sample");
  ve->add_option("--grid", ve_grid, "grid size (0: each experiment's default)");
  ve->add_option("--out", out_path, "report file (default stdout)");
  ve->add_option("--workers", workers, "worker threads (reports do not depend on it)");
  ve->add_flag("--timing", ve_timing, "record wall time (makes reports run-dependent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const std::uint64_t seed = detail::resolve_seed(seed_flag);
    if (*en) {
      RunConfig rc{"enumerate", {{"n", std::to_string(en_n)}, {"a", std::to_string(en_a)}}, 0, out_path, 0, 0};
      detail::check_bridge_args(en_n, en_a);
      detail::check_enumeration_guard(en_n);
      Json j;
      j["config"] = rc.to_json();
      j["n"] = en_n;
      j["a"] = en_a;
      j["pmf"] = Json::array();
      if (en_a < 0) {
        for (const auto& [l, p] : z_pmf(en_n, en_a).mass)
          j["pmf"].push_back({{"l", l}, {"num", numerator(p).str()}, {"den", denominator(p).str()}});
        bool factor = true;
        for (const auto& [l, p] : z_pmf(en_n, en_a).mass) {
          const PieceLaws laws = conditional_piece_laws(en_n, en_a, l);
          factor = factor && laws.independent && laws.uniform;
        }
        bool uniform = true;
        for (const auto& [v, law] : helper_distribution(en_n, en_a)) uniform = uniform && law.uniform_over_first_return;
        j["bijection_ok"] = bijection_holds(en_n, en_a);
        j["uniform_helper_ok"] = uniform;
        j["factorization_ok"] = factor;
      } else {
        // Z is defined for negative endpoints only
        j["bijection_ok"] = nullptr;
        j["uniform_helper_ok"] = nullptr;
        j["factorization_ok"] = nullptr;
      }
      detail::Sink sink(out_path, out);
      sink.get() << detail::dump(j);
      return kExitOk;
    }
    if (*sa) {
      const SamplerSpec spec{parse_process(sa_process), sa_lambda, sa_duration, sa_grid};
      const auto paths = detail::sample_ensemble(spec, sa_reps, seed, workers);
      detail::Sink sink(out_path, out);
      std::ostream& o = sink.get();
      if (!sa_marginals.empty()) {
        const auto times = detail::parse_real_list(sa_marginals);
        for (double t : times)
          if (!(t >= 0.0 && t <= sa_duration)) throw std::invalid_argument("marginal times must lie in [0, duration]");
        o << "replicate";
        for (double t : times) o << ',' << format_real(t);
        o << '\n';
        for (std::size_t i = 0; i < paths.size(); ++i) {
          o << i;
          for (double t : times) o << ',' << format_real(paths[i][paths[i].nearest_index(t)]);
          o << '\n';
        }
      } else {
        for (std::size_t i = 0; i < paths.size(); ++i) {
          if (i > 0) o << '\n';
          write_path_csv(o, paths[i]);
        }
      }
      return kExitOk;
    }
    if (*de) {
      auto params = detail::parse_params(de_params);
      if (de_lambda) params["lambda"] = *de_lambda;
      if (de_grid < 2) throw std::invalid_argument("density grid needs at least 2 rows");
      const DensitySpec d = make_density(de_family, params);
      detail::Sink sink(out_path, out);
      std::ostream& o = sink.get();
      o << "x,density,cdf\n";
      for (std::size_t i = 0; i < de_grid; ++i) {
        const double x = i + 1 == de_grid ? d.hi : d.lo + (d.hi - d.lo) * static_cast<double>(i) / static_cast<double>(de_grid - 1);
        double f = d.density(x);
        if (!std::isfinite(f)) f = 0.0;  // integrable endpoint singularity: report the open-support value
        o << format_real(x) << ',' << format_real(f) << ',' << format_real(d.cdf(x)) << '\n';
      }
      return kExitOk;
    }
    if (*mi) {
      std::vector<SampledPath> paths;
      RunConfig rc{"minorant", {{"aggregate", mi_aggregate ? "true" : "false"}}, seed, out_path, mi_reps, mi_grid};
      if (!mi_in.empty()) {
        std::ifstream in(mi_in);
        if (!in) throw std::runtime_error("cannot open input file '" + mi_in + "'");
        paths = read_paths_csv(in);
        rc.parameters["in"] = mi_in;
        rc.reps = paths.size();
        rc.grid = 0;
      } else {
        const SamplerSpec spec{parse_process(mi_process), mi_lambda, 1.0, mi_grid};
        rc.parameters["process"] = mi_process;
        rc.parameters["lambda"] = format_real(mi_lambda);
        paths = detail::sample_ensemble(spec, mi_reps, seed, workers);
      }
      Json j;
      j["config"] = rc.to_json();
      if (mi_aggregate) {
        const SegmentCountStats s = segment_count_stats(std::span<const SampledPath>(paths));
        j["histogram"] = Json::object();
        for (const auto& [k, c] : s.histogram) j["histogram"][std::to_string(k)] = c;
        j["mean"] = s.moments.mean();
        j["standard_error"] = s.moments.standard_error();
      } else {
        j["paths"] = Json::array();
        for (const auto& p : paths) {
          const MinorantResult m = convex_minorant(p);
          Json v = Json::array();
          for (std::size_t idx : m.vertices) v.push_back(p.time(idx));
          j["paths"].push_back({{"n_segments", m.segment_count()}, {"slopes", m.slopes}, {"vertices", v}});
        }
      }
      detail::Sink sink(out_path, out);
      sink.get() << detail::dump(j);
      return kExitOk;
    }
    if (*ve) {
      ExperimentConfig cfg;
      cfg.seed = seed;
      cfg.reps = ve_reps;
      cfg.grid = ve_grid;
      cfg.workers = workers;
      cfg.timing = ve_timing;
      const std::vector<std::string> ids =
          ve_experiment == "all" ? experiment_ids() : std::vector<std::string>{ve_experiment};
      RunConfig rc{"verify", {{"experiment", ve_experiment}}, seed, out_path, ve_reps, ve_grid};
      Json j;
      j["schema"] = kReportSchema;
      j["config"] = rc.to_json();
      j["reports"] = Json::array();
      bool all = true;
      for (const auto& id : ids) {
        const ExperimentReport r = run_experiment(id, cfg);
        all = all && r.passed();
        j["reports"].push_back(r.to_json());
        err << id << ": " << (r.passed() ? "pass" : "FAIL") << '\n';
      }
      j["passed"] = all;
      detail::Sink sink(out_path, out);
      sink.get() << detail::dump(j);
      return all ? kExitOk : kExitFailed;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace vervaat

#endif  // VERVAAT_CLI_HPP_
