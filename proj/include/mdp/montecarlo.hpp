#pragma once

#include <cstdint>
#include <vector>

#include "mdp/distribution.hpp"
#include "mdp/trajectory.hpp"

namespace mdp {

enum class Tail { Upper, Lower, Both };

// Replicated hitting-time experiment: n, level r in (0, mu), scale
// a_n = n^an_exponent with exponent in (0.5, 1), a grid of deviation
// thresholds and a master seed. Replication i draws from its own stream
// derived from (master_seed, i), so results do not depend on scheduling.
struct ExperimentConfig {
  DistributionSpec dist = DistributionSpec::exponential(1.0);
  int64_t n = 100;
  double r = 0.25;
  double an_exponent = 0.9;
  int64_t replications = 10000;
  std::vector<double> t_grid;  // strictly increasing positive thresholds
  double horizon = 0.0;        // <= 0 means auto: max(1, 2 r / mu)
  uint64_t master_seed = 42;
  Tail tail = Tail::Upper;

  double scale_a() const;        // a_n
  double speed() const;          // n / a_n^2
  double limit_tau() const;      // r / mu
  double resolved_horizon() const;
  void validate() const;         // throws ConfigError
};

// Scaled deviation of one replication: (n / a_n)(tau_r^n - tau_r), or a
// censoring marker when the path never reached the level before the horizon.
struct Deviation {
  double value = 0.0;
  bool censored = false;
};

struct RateRow {
  double t = 0.0;
  int64_t hits = 0;      // upper tail counts censored replications as hits
  int64_t censored = 0;  // total censored replications in the run
  double p_hat = 0.0;
  double empirical_rate = 0.0;  // -(n/a_n^2) log p_hat; +inf when hits == 0
  double theoretical_rate = 0.0;
  double ci_low = 0.0;   // Wilson 95% interval on p_hat mapped through the
  double ci_high = 0.0;  // rate transform (ci_high is +inf when hits == 0)
};

struct RateCurve {
  std::vector<RateRow> upper;  // filled for Tail::Upper and Tail::Both
  std::vector<RateRow> lower;  // filled for Tail::Lower and Tail::Both
  int64_t censored_total = 0;
  ExperimentConfig config;
  double wall_seconds = 0.0;
};

// Raw deviations, one per replication, in replication order. The parallel
// version partitions replications across OpenMP threads and is bit-identical
// to the serial reference for every thread count.
std::vector<Deviation> scaled_deviations(const ExperimentConfig& config, int threads = 0);
std::vector<Deviation> scaled_deviations_serial(const ExperimentConfig& config);

// Deterministic fold of raw deviations into tail counts, probabilities,
// empirical rates and Wilson bands. run_experiment(config) is exactly
// fold_rate_curve(config, scaled_deviations(config)).
RateCurve fold_rate_curve(const ExperimentConfig& config, const std::vector<Deviation>& devs);

RateCurve run_experiment(const ExperimentConfig& config, int threads = 0);

struct CltReport {
  double sample_var = 0.0;
  double target_var = 0.0;  // sigma2 r / mu^3
  double ks_distance = 0.0;
  int64_t censored = 0;     // excluded from the statistics, reported here
};

// Distribution check for sqrt(n)(tau_r^n - tau_r) against its Gaussian limit.
CltReport clt_check(const DistributionSpec& dist, int64_t n, double r,
                    int64_t replications, uint64_t master_seed, int threads = 0);

struct LlnPoint {
  int64_t n = 0;
  double median_abs_dev = 0.0;
};

// Median |tau_r^n - r/mu| per n; medians should shrink as n grows.
std::vector<LlnPoint> lln_check(const DistributionSpec& dist, double r,
                                const std::vector<int64_t>& n_list, int64_t replications,
                                uint64_t master_seed, int threads = 0);

// Gaussian-heuristic default grid: 40 equally spaced thresholds over
// (0, t_max] with t_max placed where roughly 10 hits are expected.
std::vector<double> default_t_grid(const DistributionSpec& dist, int64_t n,
                                   double r, double an_exponent, int64_t replications);

}  // namespace mdp
