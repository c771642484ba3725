#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mdp/errors.hpp"
#include "mdp/rate_functions.hpp"
#include "oracle_helpers.hpp"

using namespace mdp;

namespace {

PiecewisePath random_path(std::mt19937_64& gen, int max_segments = 6) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = 1 + static_cast<int>(gen() % max_segments);
  std::vector<Knot> knots{{0.0, 0.0}};
  double t = 0.0;
  for (int i = 0; i < k; ++i) {
    t += 0.1 + unif(gen);
    knots.push_back({t, 4.0 * unif(gen) - 2.0});
  }
  return PiecewisePath(std::move(knots));
}

}  // namespace

TEST_CASE("path validation") {
  CHECK_THROWS_AS(PiecewisePath({{0.0, 0.1}, {1.0, 1.0}}), ConfigError);  // f(0) != 0
  CHECK_THROWS_AS(PiecewisePath({{0.1, 0.0}, {1.0, 1.0}}), ConfigError);  // starts late
  CHECK_THROWS_AS(PiecewisePath({{0.0, 0.0}, {0.5, 1.0}, {0.4, 2.0}}), ConfigError);
  CHECK_THROWS_AS(PiecewisePath({{0.0, 0.0}}), ConfigError);
  const auto path = PiecewisePath({{0.0, 0.0}, {0.5, 1.0}, {2.0, 1.0}});
  CHECK(path.duration() == 2.0);
  CHECK(path.segments() == 2);
  CHECK(path.segment_slope(0) == doctest::Approx(2.0));
  CHECK(path.segment_slope(1) == 0.0);
}

TEST_CASE("quadratic action on reference paths") {
  const auto zero = PiecewisePath({{0.0, 0.0}, {1.0, 0.0}});
  CHECK(quadratic_action(zero, 1.0) == 0.0);

  // straight line to a=1 over T=2: a^2/(2 sigma2 T) = 0.25
  const auto line = PiecewisePath::single_slope(2.0, 1.0);
  CHECK(quadratic_action(line, 1.0) == doctest::Approx(0.25).epsilon(1e-15));

  // slopes (2, 0) on half-unit pieces: 0.5 * (4 * 0.5)
  const auto two = PiecewisePath({{0.0, 0.0}, {0.5, 1.0}, {1.0, 1.0}});
  CHECK(quadratic_action(two, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("legendre action on reference paths") {
  const auto poisson = DistributionSpec::poisson(1.0);
  const auto exp1 = DistributionSpec::exponential(1.0);
  const auto normal = DistributionSpec::normal(1.0, 1.0);

  // constant slope mu has zero action for every law
  for (const auto& dist : {poisson, exp1, normal}) {
    const auto line = PiecewisePath::single_slope(1.0, dist.mu());
    CHECK(std::abs(legendre_action(line, dist)) <= 1e-12);
  }

  // Poisson slope 2 on [0,1]: x log x - x + 1 at x = 2
  const auto steep = PiecewisePath::single_slope(1.0, 2.0);
  const double expected = 2.0 * std::log(2.0) - 1.0;
  CHECK(legendre_action(steep, poisson) == doctest::Approx(expected).epsilon(1e-12));
  // grid-search confirmation of the same value
  const double grid = oracle::conjugate_grid_search(poisson, 2.0, -40.0, 40.0);
  CHECK(legendre_action(steep, poisson) == doctest::Approx(grid).epsilon(1e-8));

  // any negative slope under Poisson blows up
  const auto dip = PiecewisePath({{0.0, 0.0}, {0.5, -0.2}, {1.0, 0.4}});
  CHECK(legendre_action(dip, poisson) == kInfinity);
}

TEST_CASE("actions are additive under concatenation") {
  std::mt19937_64 gen(5);
  const auto normal = DistributionSpec::normal(0.5, 1.2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto path = random_path(gen);
    const auto& knots = path.knots();
    const size_t cut = 1 + gen() % (knots.size() - 1);
    std::vector<Knot> head(knots.begin(), knots.begin() + cut + 1);
    if (head.size() < 2) continue;
    // shift the tail so it starts at (0,0)
    std::vector<Knot> tail{{0.0, 0.0}};
    for (size_t i = cut + 1; i < knots.size(); ++i) {
      tail.push_back({knots[i].t - knots[cut].t, knots[i].value - knots[cut].value});
    }
    const double whole_q = quadratic_action(path, 1.7);
    const double whole_l = legendre_action(path, normal);
    double parts_q = quadratic_action(PiecewisePath(head), 1.7);
    double parts_l = legendre_action(PiecewisePath(head), normal);
    if (tail.size() >= 2) {
      parts_q += quadratic_action(PiecewisePath(tail), 1.7);
      parts_l += legendre_action(PiecewisePath(tail), normal);
    }
    CHECK(whole_q == doctest::Approx(parts_q).epsilon(1e-12));
    CHECK(whole_l == doctest::Approx(parts_l).epsilon(1e-9));
  }
}

TEST_CASE("endpoint infimum formula") {
  CHECK(endpoint_action_infimum(0.0, 1.0, 1.0) == 0.0);
  CHECK(endpoint_action_infimum(1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // the hitting-rate identity: a = -mu t, T = tau_r gives mu^3 t^2 / (2 sigma2 r)
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = unif(gen), sigma2 = unif(gen), t = unif(gen);
    const double r = 0.9 * mu * std::generate_canonical<double, 53>(gen) + 0.05 * mu;
    const double tau = r / mu;
    const double lhs = endpoint_action_infimum(-mu * t, tau, sigma2);
    const double rhs = hitting_time_rate(mu, sigma2, r, t);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("Cauchy-Schwarz lower bound over random paths") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> su(0.2, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto path = random_path(gen);
    const double sigma2 = su(gen);
    const double inf = endpoint_action_infimum(path.endpoint(), path.duration(), sigma2);
    CHECK(quadratic_action(path, sigma2) >= inf - 1e-12);
  }
}

TEST_CASE("pinned-endpoint minimizer matches the closed form") {
  CHECK(endpoint_action_minimized(1.0, 1.0, 1.0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(endpoint_action_minimized(1.0, 1.0, 1.0, 8) == doctest::Approx(0.5).epsilon(1e-12));
  std::mt19937_64 gen(44);
  std::uniform_real_distribution<double> au(-3.0, 3.0);
  std::uniform_real_distribution<double> tu(0.2, 5.0);
  std::uniform_real_distribution<double> su(0.2, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = au(gen), T = tu(gen), sigma2 = su(gen);
    const double closed = endpoint_action_infimum(a, T, sigma2);
    for (int segments : {1, 2, 8, 32}) {
      CHECK(std::abs(endpoint_action_minimized(a, T, sigma2, segments) - closed) <= 1e-9);
    }
  }
}

TEST_CASE("perturbing a knot off the minimizer strictly increases the action") {
  const int segments = 8;
  const double a = 1.0, T = 1.0, sigma2 = 1.0;
  std::vector<Knot> knots;
  for (int i = 0; i <= segments; ++i) {
    knots.push_back({T * i / segments, a * i / segments});
  }
  knots[3].value += 0.05;
  const double perturbed = quadratic_action(PiecewisePath(std::move(knots)), sigma2);
  CHECK(perturbed > endpoint_action_minimized(a, T, sigma2, segments) + 1e-6);
}

TEST_CASE("steep-line family squeezes down to the pinned-endpoint infimum") {
  // Lines f(s) = -mu t (1+eps)/(tau-delta) * s on [0, tau+delta] dip below
  // -mu t near tau and have quadratic action
  // mu^2 t^2 (1+eps)^2 (tau+delta) / (2 sigma2 (tau-delta)^2), which
  // decreases to mu^2 t^2 / (2 sigma2 tau) as eps and delta shrink.
  const double mu = 1.2, sigma2 = 0.8, r = 0.3, t = 0.7;
  const double tau = r / mu;
  const double target = hitting_time_rate(mu, sigma2, r, t);
  double prev = kInfinity;
  for (double shrink : {0.2, 0.1, 0.05, 0.01, 0.002}) {
    const double eps = shrink, delta = shrink * tau;
    const double slope = -mu * t * (1.0 + eps) / (tau - delta);
    const auto path = PiecewisePath::single_slope(tau + delta, slope * (tau + delta));
    const double action = quadratic_action(path, sigma2);
    const double closed = mu * mu * t * t * (1.0 + eps) * (1.0 + eps) * (tau + delta) /
                          (2.0 * sigma2 * (tau - delta) * (tau - delta));
    CHECK(action == doctest::Approx(closed).epsilon(1e-12));
    // the line reaches -mu t inside [tau-delta, tau+delta] and costs more
    // than the unconstrained infimum
    CHECK(slope * (tau - delta) <= -mu * t);
    CHECK(action >= target);
    CHECK(action <= prev);
    prev = action;
  }
  CHECK(prev == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("hitting rate values and domain") {
  CHECK(hitting_time_rate(1.0, 1.0, 0.25, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hitting_time_rate(1.0, 1.0, 0.25, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hitting_time_rate(2.0, 3.0, 1.0, 1.0) == doctest::Approx(8.0 / 6.0).epsilon(1e-15));
  CHECK_THROWS_AS(hitting_time_rate(1.0, 1.0, 1.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(hitting_time_rate(1.0, 1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("hitting rate equals the Gaussian tail rate of the CLT limit") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unif(0.2, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double mu = unif(gen), sigma2 = unif(gen), t = unif(gen);
    const double r = mu * (0.05 + 0.9 * std::generate_canonical<double, 53>(gen));
    const double limit_var = sigma2 * r / (mu * mu * mu);  // var of (sigma/mu) B_{tau_r}
    CHECK(hitting_time_rate(mu, sigma2, r, t) ==
          doctest::Approx(t * t / (2.0 * limit_var)).epsilon(1e-12));
  }
}

TEST_CASE("conjugate grows from mu like the quadratic with cubic error") {
  const auto poisson = DistributionSpec::poisson(1.0);
  const auto exp1 = DistributionSpec::exponential(1.0);
  for (const auto& dist : {poisson, exp1}) {
    const double hs[] = {0.1, -0.1, 0.05, -0.05, 0.025, -0.025};
    double fitted_c = 0.0;
    for (double h : {0.1, -0.1}) {
      const double err =
          std::abs(legendre(dist, dist.mu() + h) - h * h / (2.0 * dist.sigma2()));
      fitted_c = std::max(fitted_c, err / std::abs(h * h * h));
    }
    CHECK(std::isfinite(fitted_c));
    CHECK(fitted_c > 0.0);
    for (double h : hs) {
      const double err =
          std::abs(legendre(dist, dist.mu() + h) - h * h / (2.0 * dist.sigma2()));
      CHECK(err <= fitted_c * std::abs(h * h * h) * (1.0 + 1e-9) + 1e-15);
    }
  }
}
