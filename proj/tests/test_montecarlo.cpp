#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mdp/errors.hpp"
#include "mdp/montecarlo.hpp"
#include "mdp/stats.hpp"

using namespace mdp;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.dist = DistributionSpec::exponential(1.0);
  config.n = 100;
  config.r = 0.25;
  config.an_exponent = 0.9;
  config.replications = 2000;
  config.t_grid = {0.05, 0.1, 0.2, 0.4};
  config.master_seed = 7;
  return config;
}

// Two atoms a hair apart: a legal law with variance 1e-18, behaving like a
// point mass at 1 for every tail threshold in use.
DistributionSpec near_deterministic_unit() {
  return DistributionSpec::table({{1.0 - 1e-9, 0.5}, {1.0 + 1e-9, 0.5}});
}

}  // namespace

TEST_CASE("config validation enforces the scaling window and level range") {
  ExperimentConfig config = small_config();
  CHECK_NOTHROW(config.validate());
  config.an_exponent = 0.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.an_exponent = 1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = small_config();
  config.r = 1.0;  // not inside (0, mu)
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = small_config();
  config.t_grid = {0.2, 0.1};
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = small_config();
  config.t_grid.clear();
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = small_config();
  config.horizon = 0.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = small_config();
  config.dist = DistributionSpec::normal(-1.0, 1.0);  // mu <= 0
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("scale helpers") {
  const ExperimentConfig config = small_config();
  CHECK(config.scale_a() == doctest::Approx(std::pow(100.0, 0.9)).epsilon(1e-15));
  CHECK(config.speed() == doctest::Approx(100.0 / std::pow(100.0, 1.8)).epsilon(1e-15));
  CHECK(config.limit_tau() == 0.25);
  CHECK(config.resolved_horizon() == 1.0);  // max(1, 2r/mu)
  ExperimentConfig far = config;
  far.r = 0.9;
  CHECK(far.resolved_horizon() == doctest::Approx(1.8).epsilon(1e-15));
}

TEST_CASE("same seed reproduces the deviation list; seeds differ") {
  const ExperimentConfig config = small_config();
  const auto a = scaled_deviations(config);
  const auto b = scaled_deviations(config);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].value == b[i].value);
    CHECK(a[i].censored == b[i].censored);
  }
  ExperimentConfig other = config;
  other.master_seed = 8;
  const auto c = scaled_deviations(other);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= (a[i].value != c[i].value);
  CHECK(differs);
}

TEST_CASE("parallel kernel is bitwise identical to the serial reference") {
  const ExperimentConfig config = small_config();
  const auto serial = scaled_deviations_serial(config);
  for (int threads : {1, 2, 3}) {
    const auto par = scaled_deviations(config, threads);
    REQUIRE(par.size() == serial.size());
    for (size_t i = 0; i < par.size(); ++i) {
      CHECK(par[i].value == serial[i].value);
      CHECK(par[i].censored == serial[i].censored);
    }
  }
}

TEST_CASE("rate curve equals the fold of its own deviations") {
  const ExperimentConfig config = small_config();
  const auto devs = scaled_deviations(config);
  const RateCurve direct = run_experiment(config);
  const RateCurve folded = fold_rate_curve(config, devs);
  REQUIRE(direct.upper.size() == folded.upper.size());
  for (size_t i = 0; i < direct.upper.size(); ++i) {
    CHECK(direct.upper[i].hits == folded.upper[i].hits);
    CHECK(direct.upper[i].p_hat == folded.upper[i].p_hat);
    CHECK(direct.upper[i].empirical_rate == folded.upper[i].empirical_rate);
    CHECK(direct.upper[i].ci_low == folded.upper[i].ci_low);
    CHECK(direct.upper[i].ci_high == folded.upper[i].ci_high);
  }
}

TEST_CASE("near-deterministic increments produce zero hits and +inf markers") {
  ExperimentConfig config = small_config();
  config.dist = near_deterministic_unit();
  config.replications = 500;
  const RateCurve curve = run_experiment(config);
  for (const RateRow& row : curve.upper) {
    CHECK(row.hits == 0);
    CHECK(row.p_hat == 0.0);
    CHECK(row.empirical_rate == kInfinity);
    CHECK(row.ci_high == kInfinity);
    CHECK(row.ci_low > 0.0);  // Wilson upper bound stays informative
  }
  const auto devs = scaled_deviations(config);
  for (const auto& d : devs) {
    CHECK_FALSE(d.censored);
    CHECK(std::abs(d.value) < 1e-6);
  }
}

TEST_CASE("tail bookkeeping: monotone hits, inversion, censoring accounting") {
  // mixed-sign increments at small n produce real censoring
  ExperimentConfig config;
  config.dist = DistributionSpec::normal(0.6, 1.0);
  config.n = 10;
  config.r = 0.5;
  config.an_exponent = 0.75;
  config.replications = 3000;
  config.t_grid = {0.1, 0.3, 0.6, 1.0, 1.5};
  config.master_seed = 11;
  config.tail = Tail::Both;
  const auto devs = scaled_deviations(config);
  const RateCurve curve = fold_rate_curve(config, devs);

  int64_t censored = 0;
  for (const auto& d : devs) censored += d.censored ? 1 : 0;
  CHECK(censored > 0);
  CHECK(curve.censored_total == censored);

  REQUIRE(curve.upper.size() == config.t_grid.size());
  REQUIRE(curve.lower.size() == config.t_grid.size());
  for (size_t i = 0; i < curve.upper.size(); ++i) {
    const RateRow& up = curve.upper[i];
    const RateRow& low = curve.lower[i];
    CHECK(up.censored == censored);
    // censored replications count as upper-tail hits, never lower-tail
    int64_t above = 0, below = 0;
    for (const auto& d : devs) {
      if (!d.censored && d.value > up.t) ++above;
      if (!d.censored && d.value < -up.t) ++below;
    }
    CHECK(up.hits == above + censored);
    CHECK(low.hits == below);
    // every replication lands in exactly one bucket per tail
    CHECK((up.hits - censored) + (config.replications - up.hits) + censored ==
          config.replications);
    if (i > 0) {
      CHECK(up.hits <= curve.upper[i - 1].hits);
      CHECK(low.hits <= curve.lower[i - 1].hits);
    }
    // estimator inversion: exp(-rate/speed) * M == hits
    if (up.hits > 0) {
      const double recovered =
          std::exp(-up.empirical_rate / config.speed()) * config.replications;
      CHECK(recovered == doctest::Approx(static_cast<double>(up.hits)).epsilon(1e-12));
    }
    CHECK(up.theoretical_rate == low.theoretical_rate);
    if (std::isfinite(up.empirical_rate)) {
      CHECK(up.ci_low <= up.empirical_rate);
      CHECK(up.empirical_rate <= up.ci_high);
    }
  }
}

TEST_CASE("synthetic count injection recovers the planted rate") {
  ExperimentConfig config = small_config();
  config.replications = 10000;
  config.t_grid = {0.5};
  const double speed = config.speed();
  for (double c : {0.05, 0.1, 0.2}) {
    const double q = std::exp(-c / speed);
    const auto planted = static_cast<int64_t>(std::ceil(q * config.replications));
    REQUIRE(planted >= 2);
    std::vector<Deviation> devs;
    for (int64_t i = 0; i < config.replications; ++i) {
      devs.push_back({i < planted ? 1.0 : 0.0, false});
    }
    const RateCurve curve = fold_rate_curve(config, devs);
    const double bound =
        speed * std::log(static_cast<double>(planted) / (planted - 1.0)) + 1e-12;
    CHECK(std::abs(curve.upper[0].empirical_rate - c) <= bound);
  }
}

TEST_CASE("deviation sample is centered at the CLT scale") {
  ExperimentConfig config;
  config.dist = DistributionSpec::exponential(1.0);
  config.n = 10000;
  config.r = 0.25;
  config.an_exponent = 0.9;
  config.replications = 10000;
  config.t_grid = {0.01};
  config.master_seed = 42;
  const auto devs = scaled_deviations(config);
  double mean = 0.0;
  for (const auto& d : devs) {
    REQUIRE_FALSE(d.censored);
    mean += d.value;
  }
  mean /= static_cast<double>(devs.size());
  double ss = 0.0;
  for (const auto& d : devs) ss += (d.value - mean) * (d.value - mean);
  const double stderr_mean =
      std::sqrt(ss / static_cast<double>(devs.size() - 1) / devs.size());
  CHECK(std::abs(mean) <= 3.0 * stderr_mean);
}

TEST_CASE("clt check matches the limit law for normal increments") {
  const auto report =
      clt_check(DistributionSpec::normal(1.0, 1.0), 2500, 0.25, 2000, 42);
  CHECK(report.target_var == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(report.censored == 0);
  CHECK(std::abs(report.sample_var / report.target_var - 1.0) < 0.15);
  CHECK(report.ks_distance < 0.06);
}

TEST_CASE("ks distance of a point mass against a continuous law is one half") {
  const std::vector<double> degenerate(1000, 0.0);
  CHECK(ks_distance_to_normal(degenerate, 0.0, 0.25) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("lln medians vanish for near-deterministic increments") {
  const auto points = lln_check(near_deterministic_unit(), 0.25, {10, 100}, 200, 4);
  for (const LlnPoint& p : points) CHECK(p.median_abs_dev <= 1e-6);
}

TEST_CASE("lln medians shrink with n and are stable in the replication count") {
  const auto dist = DistributionSpec::exponential(1.0);
  const auto points = lln_check(dist, 0.25, {100, 1000, 10000}, 1000, 42);
  REQUIRE(points.size() == 3);
  CHECK(points[0].median_abs_dev > points[1].median_abs_dev);
  CHECK(points[1].median_abs_dev > points[2].median_abs_dev);

  const auto doubled = lln_check(dist, 0.25, {100, 1000, 10000}, 2000, 42);
  for (size_t i = 0; i < points.size(); ++i) {
    const double ratio = doubled[i].median_abs_dev / points[i].median_abs_dev;
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
  }
  CHECK_THROWS_AS(lln_check(dist, 0.25, {1000, 100}, 100, 1), ConfigError);
}

TEST_CASE("default grid ends where roughly ten hits are expected") {
  const auto dist = DistributionSpec::normal(1.0, 1.0);
  const auto grid = default_t_grid(dist, 10000, 0.25, 0.9, 10000);
  REQUIRE(grid.size() == 40);
  ExperimentConfig config;
  config.dist = dist;
  config.n = 10000;
  config.r = 0.25;
  config.an_exponent = 0.9;
  config.replications = 10000;
  config.t_grid = grid;
  config.master_seed = 3;
  const RateCurve curve = run_experiment(config);
  const int64_t edge_hits = curve.upper.back().hits;
  CHECK(edge_hits >= 1);
  CHECK(edge_hits <= 40);  // order ten, not hundreds
}
