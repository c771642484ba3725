#pragma once

#include <cstdint>
#include <vector>

#include "mdp/distribution.hpp"
#include "mdp/rng.hpp"

namespace mdp {

// One realization of the interpolated partial-sum path on [0, horizon]:
// linear between the grid points k/n, with value prefix_sums[k] at k/n.
// Immutable after construction.
struct Trajectory {
  int64_t n = 1;
  double horizon = 1.0;
  std::vector<double> increments;   // ceil(n * horizon) draws
  std::vector<double> prefix_sums;  // size increments.size()+1, [0] = 0

  static Trajectory from_increments(int64_t n, double horizon, std::vector<double> inc);
};

// Draws ceil(n * horizon) i.i.d. increments from `dist` and stores exact
// prefix sums (compensated summation beyond n = 1e5).
Trajectory build_trajectory(const DistributionSpec& dist, int64_t n, double horizon,
                            RngStream& rng);

// Interpolated value at t in [0, horizon]; throws std::out_of_range outside.
double evaluate(const Trajectory& traj, double t);

struct HittingResult {
  enum class Status { Hit, Censored };
  Status status = Status::Censored;
  double tau = 0.0;     // meaningful only when status == Hit; in [0, horizon]
  double level_r = 0.0;
  int64_t n = 1;

  bool hit() const { return status == Status::Hit; }
};

// First time the path reaches level n*r, found by exact linear crossing in
// the first qualifying segment; Censored when no crossing occurs before the
// horizon. Requires r > 0.
HittingResult hitting_time(const Trajectory& traj, double r);

// Deterministic limit r / mu. Throws std::domain_error when mu == 0.
double limit_hitting_time(double mu, double r);

}  // namespace mdp
