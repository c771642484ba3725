#pragma once

#include <cstddef>
#include <vector>

#include "mdp/distribution.hpp"

namespace mdp {

struct Knot {
  double t = 0.0;
  double value = 0.0;
};

// A piecewise-linear function on [0, T] with f(0) = 0, given by its knots.
// Knot times must be strictly increasing, starting at (0, 0).
class PiecewisePath {
 public:
  explicit PiecewisePath(std::vector<Knot> knots);

  // The straight line from (0,0) to (T, endpoint).
  static PiecewisePath single_slope(double T, double endpoint);

  double duration() const { return knots_.back().t; }
  double endpoint() const { return knots_.back().value; }
  size_t segments() const { return knots_.size() - 1; }
  double segment_dt(size_t i) const { return knots_[i + 1].t - knots_[i].t; }
  double segment_slope(size_t i) const {
    return (knots_[i + 1].value - knots_[i].value) / segment_dt(i);
  }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

// (1 / (2 sigma2)) * integral of f'(u)^2, exact for piecewise-linear paths.
double quadratic_action(const PiecewisePath& path, double sigma2);

// Integral of Lambda*(f'(u)); +infinity as soon as one segment slope has an
// infinite conjugate. May propagate ConvergenceFailure from the conjugate.
double legendre_action(const PiecewisePath& path, const DistributionSpec& dist);

// Smallest quadratic action among paths pinned to f(T) = a: a^2 / (2 sigma2 T).
double endpoint_action_infimum(double a, double T, double sigma2);

// Minimizes the quadratic action over piecewise-linear paths with
// `segments` equal-width pieces and f(T) = a, by solving the stationarity
// system for the interior knots exactly (tridiagonal). The result must match
// endpoint_action_infimum to solver precision.
double endpoint_action_minimized(double a, double T, double sigma2, int segments);

// Decay rate of hitting-time deviations: mu^3 t^2 / (2 sigma2 r), returned
// with positive sign. Requires r in (0, mu); throws std::domain_error.
double hitting_time_rate(double mu, double sigma2, double r, double t);

}  // namespace mdp
