#include "mdp/rate_functions.hpp"

#include <cmath>
#include <stdexcept>

#include "mdp/errors.hpp"

namespace mdp {

PiecewisePath::PiecewisePath(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw ConfigError("path: need at least two knots");
  if (knots_.front().t != 0.0 || knots_.front().value != 0.0) {
    throw ConfigError("path: first knot must be (0, 0)");
  }
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].t > knots_[i - 1].t)) {
      throw ConfigError("path: knot times must be strictly increasing");
    }
    if (!std::isfinite(knots_[i].t) || !std::isfinite(knots_[i].value)) {
      throw ConfigError("path: non-finite knot");
    }
  }
}

PiecewisePath PiecewisePath::single_slope(double T, double endpoint) {
  if (!(T > 0.0)) throw ConfigError("path: T must be positive");
  return PiecewisePath({{0.0, 0.0}, {T, endpoint}});
}

double quadratic_action(const PiecewisePath& path, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("quadratic_action: sigma2 must be > 0");
  double acc = 0.0;
  for (size_t i = 0; i < path.segments(); ++i) {
    const double s = path.segment_slope(i);
    acc += s * s * path.segment_dt(i);
  }
  return acc / (2.0 * sigma2);
}

double legendre_action(const PiecewisePath& path, const DistributionSpec& dist) {
  double acc = 0.0;
  for (size_t i = 0; i < path.segments(); ++i) {
    const double conj = legendre(dist, path.segment_slope(i));
    if (std::isinf(conj)) return kInfinity;
    acc += conj * path.segment_dt(i);
  }
  return acc;
}

double endpoint_action_infimum(double a, double T, double sigma2) {
  if (!(T > 0.0) || !(sigma2 > 0.0)) {
    throw std::domain_error("endpoint_action_infimum: need T > 0 and sigma2 > 0");
  }
  return a * a / (2.0 * sigma2 * T);
}

double endpoint_action_minimized(double a, double T, double sigma2, int segments) {
  if (segments < 1) throw std::domain_error("endpoint_action_minimized: segments >= 1");
  if (!(T > 0.0) || !(sigma2 > 0.0)) {
    throw std::domain_error("endpoint_action_minimized: need T > 0 and sigma2 > 0");
  }
  const double dt = T / segments;
  std::vector<Knot> knots(segments + 1);
  knots[0] = {0.0, 0.0};
  knots[segments] = {T, a};
  if (segments > 1) {
    // Stationarity of sum (f_{i+1} - f_i)^2 / dt in the interior knots is the
    // discrete Laplace system 2 f_i = f_{i-1} + f_{i+1}; solve it directly.
    const int k = segments - 1;  // unknowns
    std::vector<double> diag(k, 2.0), rhs(k, 0.0);
    rhs[k - 1] = a;
    // Thomas elimination with off-diagonal -1.
    for (int i = 1; i < k; ++i) {
      const double w = -1.0 / diag[i - 1];
      diag[i] += w;            // diag - 1/prev_diag
      rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> f(k);
    f[k - 1] = rhs[k - 1] / diag[k - 1];
    for (int i = k - 2; i >= 0; --i) f[i] = (rhs[i] + f[i + 1]) / diag[i];
    for (int i = 1; i < segments; ++i) knots[i] = {dt * i, f[i - 1]};
  }
  return quadratic_action(PiecewisePath(std::move(knots)), sigma2);
}

double hitting_time_rate(double mu, double sigma2, double r, double t) {
  if (!(sigma2 > 0.0)) throw std::domain_error("hitting_time_rate: sigma2 must be > 0");
  if (!(t > 0.0)) throw std::domain_error("hitting_time_rate: t must be > 0");
  if (!(r > 0.0 && r < mu)) {
    throw std::domain_error("hitting_time_rate: r must lie in (0, mu)");
  }
  return mu * mu * mu * t * t / (2.0 * sigma2 * r);
}

}  // namespace mdp
