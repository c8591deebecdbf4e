#include <gtest/gtest.h>

#include <set>
#include <string>

#include "vervaat/experiments.hpp"

namespace vervaat {
namespace {

ExperimentConfig small(std::size_t reps, std::size_t grid, unsigned workers = 1) {
  ExperimentConfig c;
  c.seed = 11;
  c.reps = reps;
  c.grid = grid;
  c.workers = workers;
  return c;
}

TEST(Experiments, RegistryListsEveryExperiment) {
  const auto& ids = experiment_ids();
  EXPECT_EQ(ids.size(), 11u);
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
  EXPECT_THROW(run_experiment("no_such_experiment", small(100, 0)), std::invalid_argument);
}

TEST(Experiments, DiscreteExactSuitePasses) {
  const ExperimentReport r = run_experiment("discrete_exact", small(100, 0));
  EXPECT_TRUE(r.passed());
  for (const auto& c : r.checks) EXPECT_EQ(c.statistic, 0.0) << c.name;
  EXPECT_EQ(r.estimates.at("endpoint_cases"), 56.0);
}

TEST(Experiments, LocalLimitPasses) {
  const ExperimentReport r = run_experiment("local_limit", small(100, 0));
  EXPECT_TRUE(r.passed());
  ASSERT_NE(r.find_check("tv_largest_n"), nullptr);
  EXPECT_LT(r.find_check("tv_largest_n")->statistic, 0.02);
}

TEST(Experiments, ReportJsonShape) {
  const ExperimentReport r = run_experiment("meander_moments", small(300, 64));
  const Json j = r.to_json();
  for (const char* key : {"schema", "thresholds_version", "id", "parameters", "replicates", "grid", "seed", "checks",
                          "estimates", "passed"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_FALSE(j.contains("wall_seconds"));
  EXPECT_EQ(j["id"], "meander_moments");
  EXPECT_EQ(j["grid"], 64);
  for (const auto& c : j["checks"])
    for (const char* key : {"name", "statistic", "threshold", "rule", "passed", "derivation"})
      EXPECT_TRUE(c.contains(key)) << key;
}

TEST(Experiments, TimingIsOptIn) {
  ExperimentConfig c = small(100, 0);
  c.timing = true;
  EXPECT_TRUE(run_experiment("discrete_exact", c).to_json().contains("wall_seconds"));
}

TEST(Experiments, ReportsDoNotDependOnWorkerCount) {
  const struct {
    const char* id;
    std::size_t reps, grid;
  } cases[] = {{"meander_moments", 400, 32}, {"convex_minorant", 200, 128}, {"biane_shift", 200, 64},
               {"non_markov", 200, 64}};
  for (const auto& k : cases) {
    const std::string one = run_experiment(k.id, small(k.reps, k.grid, 1)).to_json().dump();
    const std::string three = run_experiment(k.id, small(k.reps, k.grid, 3)).to_json().dump();
    EXPECT_EQ(one, three) << k.id;
  }
}

TEST(Experiments, SmallRunsProduceNamedFiniteChecks) {
  const struct {
    const char* id;
    std::size_t reps, grid;
  } cases[] = {{"decomposition", 300, 256}, {"duality", 200, 256},     {"vervaat_limit", 200, 256},
               {"moments_vb", 200, 100},    {"above_drift", 1000, 256}, {"convex_minorant", 200, 256}};
  for (const auto& k : cases) {
    const ExperimentReport r = run_experiment(k.id, small(k.reps, k.grid));
    EXPECT_FALSE(r.checks.empty()) << k.id;
    std::set<std::string> names;
    for (const auto& c : r.checks) {
      EXPECT_TRUE(names.insert(c.name).second) << k.id << ": duplicate " << c.name;
      EXPECT_FALSE(c.derivation.empty()) << c.name;
    }
    EXPECT_EQ(r.grid, k.grid);
  }
}

TEST(Experiments, RejectsTooFewReplicates) {
  EXPECT_THROW(run_experiment("meander_moments", small(50, 64)), std::invalid_argument);
  EXPECT_THROW(run_experiment("moments_vb", small(200, 1024)), std::invalid_argument);
  EXPECT_THROW(run_experiment("above_drift", small(500, 256)), std::invalid_argument);
}

TEST(ExperimentHelpers, ShiftIndexLawIsADistribution) {
  for (double lambda : {-1.0, 0.0}) {
    const auto cum = detail::shift_index_cdf(lambda, 256);
    for (std::size_t k = 1; k < cum.size(); ++k) EXPECT_LE(cum[k - 1], cum[k] + 1e-15);
    EXPECT_NEAR(cum.back(), 1.0, 1e-12);
  }
  EXPECT_NEAR(detail::shift_index_cdf(0.0, 8)[3], 0.5, 1e-15);
}

TEST(ExperimentHelpers, GridTimesAreComparedOnTheLattice) {
  // ceil(T N)/N and floor(T N)/N of exact uniform times both match the uniform law
  const std::size_t n = 64;
  std::vector<double> up, down;
  RngStream s(3, 0);
  for (int i = 0; i < 5000; ++i) {
    const double t = s.uniform();
    up.push_back(std::ceil(t * n) / n);
    down.push_back(std::floor(t * n) / n);
  }
  auto uniform = [](double t) { return t; };
  EXPECT_LT(detail::ks_grid_times(up, n, detail::CellEnd::right, uniform), 0.03);
  EXPECT_LT(detail::ks_grid_times(down, n, detail::CellEnd::left, uniform), 0.03);
  EXPECT_GT(detail::ks_grid_times(down, n, detail::CellEnd::right, uniform), 0.012);
}

TEST(ExperimentHelpers, BridgeCorrectedPassageOnALine) {
  // decreasing line from 0 to -1 on 10 cells crosses -0.55 in the sixth cell
  std::vector<double> v(11);
  for (std::size_t i = 0; i <= 10; ++i) v[i] = -0.1 * static_cast<double>(i);
  const SampledPath p(1.0, v);
  RngStream s(1, 1);
  const double t = detail::first_time_below_bridge_corrected(p, -0.55, s);
  EXPECT_GE(t, 0.0);
  EXPECT_LE(t, 0.55);
  EXPECT_EQ(std::fmod(t * 20.0, 2.0), 1.0);
}

}  // namespace
}  // namespace vervaat
