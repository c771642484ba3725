#include "mdp/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mdp/errors.hpp"
#include "mdp/format.hpp"
#include "mdp/stats.hpp"
#include "mdp/rate_functions.hpp"

namespace mdp {

double ExperimentConfig::scale_a() const {
  return std::pow(static_cast<double>(n), an_exponent);
}

double ExperimentConfig::speed() const {
  const double a = scale_a();
  return static_cast<double>(n) / (a * a);
}

double ExperimentConfig::limit_tau() const { return r / dist.mu(); }

double ExperimentConfig::resolved_horizon() const {
  if (horizon > 0.0) return horizon;
  return std::max(1.0, 2.0 * r / dist.mu());
}

void ExperimentConfig::validate() const {
  if (n < 1) throw ConfigError("experiment: n must be >= 1");
  if (!(dist.mu() > 0.0)) {
    throw ConfigError("experiment: increment mean must be positive, got mu = " +
                      format_double(dist.mu()));
  }
  if (!(r > 0.0 && r < dist.mu())) {
    throw ConfigError("experiment: r must lie in (0, mu) = (0, " +
                      format_double(dist.mu()) + ")");
  }
  if (!(an_exponent > 0.5 && an_exponent < 1.0)) {
    throw ConfigError("experiment: an_exponent must lie strictly in (0.5, 1)");
  }
  if (replications < 1) throw ConfigError("experiment: replications must be >= 1");
  if (t_grid.empty()) throw ConfigError("experiment: t_grid must not be empty");
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t > prev)) {
      throw ConfigError("experiment: t_grid must be strictly increasing and positive");
    }
    prev = t;
  }
  if (horizon > 0.0 && horizon < 1.0) {
    throw ConfigError("experiment: horizon must be >= 1 (or auto)");
  }
}

namespace {

Deviation one_replication(const ExperimentConfig& config, double horizon, double tau_limit,
                          double n_over_a, int64_t index) {
  RngStream stream(config.master_seed, static_cast<uint64_t>(index));
  const Trajectory traj = build_trajectory(config.dist, config.n, horizon, stream);
  const HittingResult hit = hitting_time(traj, config.r);
  if (!hit.hit()) return {0.0, true};
  return {n_over_a * (hit.tau - tau_limit), false};
}

}  // namespace

std::vector<Deviation> scaled_deviations(const ExperimentConfig& config, int threads) {
  config.validate();
  const double horizon = config.resolved_horizon();
  const double tau_limit = config.limit_tau();
  const double n_over_a = static_cast<double>(config.n) / config.scale_a();
  std::vector<Deviation> devs(config.replications);
#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (int64_t i = 0; i < config.replications; ++i) {
    devs[i] = one_replication(config, horizon, tau_limit, n_over_a, i);
  }
#else
  (void)threads;
  for (int64_t i = 0; i < config.replications; ++i) {
    devs[i] = one_replication(config, horizon, tau_limit, n_over_a, i);
  }
#endif
  return devs;
}

std::vector<Deviation> scaled_deviations_serial(const ExperimentConfig& config) {
  config.validate();
  const double horizon = config.resolved_horizon();
  const double tau_limit = config.limit_tau();
  const double n_over_a = static_cast<double>(config.n) / config.scale_a();
  std::vector<Deviation> devs(config.replications);
  for (int64_t i = 0; i < config.replications; ++i) {
    devs[i] = one_replication(config, horizon, tau_limit, n_over_a, i);
  }
  return devs;
}

namespace {

RateRow make_row(const ExperimentConfig& config, double t, int64_t hits, int64_t censored) {
  RateRow row;
  row.t = t;
  row.hits = hits;
  row.censored = censored;
  const double m = static_cast<double>(config.replications);
  const double speed = config.speed();
  row.p_hat = static_cast<double>(hits) / m;
  row.empirical_rate = hits > 0 ? -speed * std::log(row.p_hat) : kInfinity;
  row.theoretical_rate =
      hitting_time_rate(config.dist.mu(), config.dist.sigma2(), config.r, t);
  const WilsonInterval ci = wilson_interval(hits, config.replications);
  // The rate transform is monotone decreasing in p, so the band flips.
  row.ci_low = ci.high >= 1.0 ? 0.0 : -speed * std::log(ci.high);
  row.ci_high = ci.low > 0.0 ? -speed * std::log(ci.low) : kInfinity;
  return row;
}

}  // namespace

RateCurve fold_rate_curve(const ExperimentConfig& config, const std::vector<Deviation>& devs) {
  config.validate();
  if (static_cast<int64_t>(devs.size()) != config.replications) {
    throw ConfigError("fold: deviation count does not match replications");
  }
  RateCurve curve;
  curve.config = config;
  for (const Deviation& d : devs) {
    if (d.censored) ++curve.censored_total;
  }
  const bool want_upper = config.tail != Tail::Lower;
  const bool want_lower = config.tail != Tail::Upper;
  for (double t : config.t_grid) {
    if (want_upper) {
      // Censored replications exceed every threshold (tau = +inf convention).
      int64_t hits = curve.censored_total;
      for (const Deviation& d : devs) {
        if (!d.censored && d.value > t) ++hits;
      }
      curve.upper.push_back(make_row(config, t, hits, curve.censored_total));
    }
    if (want_lower) {
      int64_t hits = 0;
      for (const Deviation& d : devs) {
        if (!d.censored && d.value < -t) ++hits;
      }
      curve.lower.push_back(make_row(config, t, hits, curve.censored_total));
    }
  }
  return curve;
}

RateCurve run_experiment(const ExperimentConfig& config, int threads) {
  const auto start = std::chrono::steady_clock::now();
  RateCurve curve = fold_rate_curve(config, scaled_deviations(config, threads));
  curve.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start).count();
  return curve;
}

CltReport clt_check(const DistributionSpec& dist, int64_t n, double r,
                    int64_t replications, uint64_t master_seed, int threads) {
  if (n < 1 || replications < 1 || !(r > 0.0 && r < dist.mu())) {
    throw ConfigError("clt_check: need n >= 1, replications >= 1 and r in (0, mu)");
  }
  const double tau_limit = r / dist.mu();
  const double horizon = std::max(1.0, 2.0 * tau_limit);
  const double root_n = std::sqrt(static_cast<double>(n));
  std::vector<Deviation> z(replications);
#ifdef _OPENMP
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (int64_t i = 0; i < replications; ++i) {
    RngStream stream(master_seed, static_cast<uint64_t>(i));
    const Trajectory traj = build_trajectory(dist, n, horizon, stream);
    const HittingResult hit = hitting_time(traj, r);
    z[i] = hit.hit() ? Deviation{root_n * (hit.tau - tau_limit), false}
                     : Deviation{0.0, true};
  }

  CltReport report;
  report.target_var = dist.sigma2() * r / (dist.mu() * dist.mu() * dist.mu());
  std::vector<double> values;
  values.reserve(replications);
  for (const Deviation& d : z) {
    if (d.censored) {
      ++report.censored;
    } else {
      values.push_back(d.value);
    }
  }
  if (values.size() >= 2) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    report.sample_var = ss / static_cast<double>(values.size() - 1);
  }
  if (!values.empty()) {
    report.ks_distance = ks_distance_to_normal(values, 0.0, report.target_var);
  }
  return report;
}

std::vector<LlnPoint> lln_check(const DistributionSpec& dist, double r,
                                const std::vector<int64_t>& n_list, int64_t replications,
                                uint64_t master_seed, int threads) {
  if (n_list.empty() || replications < 1 || !(r > 0.0 && r < dist.mu())) {
    throw ConfigError("lln_check: need nonempty n_list, replications >= 1, r in (0, mu)");
  }
  for (size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw ConfigError("lln_check: n_list must be strictly increasing");
    }
  }
  const double tau_limit = r / dist.mu();
  const double horizon = std::max(1.0, 2.0 * tau_limit);
  std::vector<LlnPoint> points;
  points.reserve(n_list.size());
  for (size_t j = 0; j < n_list.size(); ++j) {
    const int64_t n = n_list[j];
    std::vector<double> dev(replications);
    // Streams stay disjoint across the n values.
    const uint64_t base = static_cast<uint64_t>(j) * static_cast<uint64_t>(replications);
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (int64_t i = 0; i < replications; ++i) {
      RngStream stream(master_seed, base + static_cast<uint64_t>(i));
      const Trajectory traj = build_trajectory(dist, n, horizon, stream);
      const HittingResult hit = hitting_time(traj, r);
      // Censored replications enter at the horizon gap, the worst observed
      // deviation, so they are never silently dropped.
      dev[i] = hit.hit() ? std::abs(hit.tau - tau_limit) : horizon - tau_limit;
    }
    points.push_back({n, median(std::move(dev))});
  }
  return points;
}

std::vector<double> default_t_grid(const DistributionSpec& dist, int64_t n,
                                   double r, double an_exponent, int64_t replications) {
  const double a = std::pow(static_cast<double>(n), an_exponent);
  const double mu = dist.mu();
  const double var_d = (static_cast<double>(n) / (a * a)) * dist.sigma2() * r / (mu * mu * mu);
  const double p_edge = std::min(0.4, 10.0 / static_cast<double>(replications));
  const double t_max = normal_quantile(1.0 - p_edge) * std::sqrt(var_d);
  std::vector<double> grid;
  grid.reserve(40);
  for (int k = 1; k <= 40; ++k) grid.push_back(t_max * k / 40.0);
  return grid;
}

}  // namespace mdp
