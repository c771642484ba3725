#include "mdp/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "mdp/errors.hpp"

namespace mdp {

namespace {

constexpr int64_t kCompensatedThreshold = 100000;

void fill_prefix_sums(Trajectory& traj) {
  const size_t m = traj.increments.size();
  traj.prefix_sums.assign(m + 1, 0.0);
  if (traj.n > kCompensatedThreshold) {
    // Neumaier running sum keeps the evaluation contract at large n.
    double sum = 0.0, comp = 0.0;
    for (size_t k = 0; k < m; ++k) {
      const double x = traj.increments[k];
      const double t = sum + x;
      comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
      sum = t;
      traj.prefix_sums[k + 1] = sum + comp;
    }
  } else {
    double sum = 0.0;
    for (size_t k = 0; k < m; ++k) {
      sum += traj.increments[k];
      traj.prefix_sums[k + 1] = sum;
    }
  }
}

int64_t increment_count(int64_t n, double horizon) {
  return static_cast<int64_t>(std::ceil(static_cast<double>(n) * horizon));
}

}  // namespace

Trajectory Trajectory::from_increments(int64_t n, double horizon, std::vector<double> inc) {
  if (n < 1) throw ConfigError("trajectory: n must be >= 1");
  if (!(horizon >= 1.0)) throw ConfigError("trajectory: horizon must be >= 1");
  if (static_cast<int64_t>(inc.size()) < increment_count(n, horizon)) {
    throw ConfigError("trajectory: too few increments for the horizon");
  }
  Trajectory traj;
  traj.n = n;
  traj.horizon = horizon;
  traj.increments = std::move(inc);
  fill_prefix_sums(traj);
  return traj;
}

Trajectory build_trajectory(const DistributionSpec& dist, int64_t n, double horizon,
                            RngStream& rng) {
  if (n < 1) throw ConfigError("build_trajectory: n must be >= 1");
  if (!(horizon >= 1.0)) throw ConfigError("build_trajectory: horizon must be >= 1");
  Trajectory traj;
  traj.n = n;
  traj.horizon = horizon;
  const int64_t m = increment_count(n, horizon);
  traj.increments.reserve(m);
  for (int64_t i = 0; i < m; ++i) traj.increments.push_back(sample(dist, rng));
  fill_prefix_sums(traj);
  return traj;
}

double evaluate(const Trajectory& traj, double t) {
  if (t < 0.0 || t > traj.horizon) {
    throw std::out_of_range("evaluate: t outside [0, horizon]");
  }
  const double u = t * static_cast<double>(traj.n);
  const size_t m = traj.increments.size();
  // Snap to the nearest grid index when u sits within rounding noise of it,
  // so evaluate(k/n) returns prefix_sums[k] exactly.
  const double nearest = std::round(u);
  if (std::abs(u - nearest) <= 32.0 * 2.220446049250313e-16 * std::max(1.0, std::abs(u))) {
    return traj.prefix_sums[std::min(static_cast<size_t>(nearest), m)];
  }
  const double kd = std::floor(u);
  const auto k = static_cast<size_t>(kd);
  if (k >= m) return traj.prefix_sums[m];
  return traj.prefix_sums[k] + (u - kd) * traj.increments[k];
}

HittingResult hitting_time(const Trajectory& traj, double r) {
  if (!(r > 0.0)) throw ConfigError("hitting_time: r must be > 0");
  HittingResult result;
  result.level_r = r;
  result.n = traj.n;
  const double n = static_cast<double>(traj.n);
  const double level = n * r;
  const size_t m = traj.increments.size();
  const double horizon_slack = traj.horizon * (1.0 + 4.0 * 2.220446049250313e-16);

  for (size_t k = 0; k < m; ++k) {
    const double start = traj.prefix_sums[k];
    double tau;
    if (start >= level) {
      // Exact touch at a grid point: the infimum is the node itself.
      tau = static_cast<double>(k) / n;
    } else {
      const double step = traj.increments[k];
      if (!(step > 0.0) || traj.prefix_sums[k + 1] < level) continue;
      tau = (static_cast<double>(k) + (level - start) / step) / n;
    }
    if (tau > horizon_slack) break;  // later segments start even further out
    result.status = HittingResult::Status::Hit;
    result.tau = std::min(tau, traj.horizon);
    return result;
  }
  result.status = HittingResult::Status::Censored;
  return result;
}

double limit_hitting_time(double mu, double r) {
  if (mu == 0.0) throw std::domain_error("limit_hitting_time: mu must be nonzero");
  return r / mu;
}

}  // namespace mdp
