#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdp/rng.hpp"

namespace mdp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class DistKind { Exponential, Poisson, Normal, BernoulliShifted, TableDiscrete };

// Open interval (lo, hi); endpoints may be infinite.
struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;
  bool contains(double a) const { return a > lo && a < hi; }
};

// An increment law: sampling, exact moments, cumulant generating function
// Lambda with its effective domain, and Legendre transforms. Immutable
// after construction and safe to share across threads.
class DistributionSpec {
 public:
  static DistributionSpec exponential(double rate);
  static DistributionSpec poisson(double rate);
  static DistributionSpec normal(double mean, double stdev);
  static DistributionSpec bernoulli_shifted(double p, double offset);
  // Atoms are (value, probability) pairs; probabilities must be nonnegative
  // and sum to 1 within 1e-12. At least two distinct values are required.
  static DistributionSpec table(std::vector<std::pair<double, double>> atoms);

  DistKind kind() const { return kind_; }
  double mu() const { return mu_; }
  double sigma2() const { return sigma2_; }

  // Open interval on which Lambda(a) is finite.
  const Interval& lambda_domain() const { return lambda_domain_; }
  // Open range of Lambda'(a) over the domain interior.
  const Interval& mean_range() const { return mean_range_; }

  // First / second scalar parameter (rate, mean/stdev, p/offset).
  double param1() const { return p1_; }
  double param2() const { return p2_; }
  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }

  // Round-trippable text form, e.g. "poisson:1" or "normal:1,0.5".
  std::string describe() const;

 private:
  DistributionSpec() = default;

  DistKind kind_ = DistKind::Normal;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::vector<std::pair<double, double>> atoms_;
  double mu_ = 0.0;
  double sigma2_ = 0.0;
  Interval lambda_domain_;
  Interval mean_range_;
};

struct Assumption2Witness {
  double theta = 0.0;  // in (0, 1]
  double v = 0.0;      // > 1
  double b = 0.0;      // > 0, with E exp(theta |X|^v) <= e^b
};

struct AssumptionReport {
  bool assumption1_holds = false;
  std::string assumption1_detail;
  bool assumption2_holds = false;
  std::optional<Assumption2Witness> assumption2_witness;
};

// One draw of X1. Repeated calls on the same stream reproduce the same
// sequence bit for bit.
double sample(const DistributionSpec& dist, RngStream& rng);

// Lambda(a) = log E exp(a X1); +infinity outside the effective domain.
double cgf(const DistributionSpec& dist, double a);

// Lambda'(a) on the domain interior (strictly increasing there).
double cgf_derivative(const DistributionSpec& dist, double a);

// Lambda''(a) > 0 on the domain interior.
double cgf_second_derivative(const DistributionSpec& dist, double a);

// Convex conjugate Lambda*(x) = sup_a { a x - Lambda(a) } by safeguarded
// Newton on Lambda'(a) = x with a bisection fallback; boundary points of the
// closure of Lambda''s range get their limit value, everything outside is
// +infinity. Throws ConvergenceFailure when the residual tolerance
// 1e-10 * max(1, |x|) is not reached within the iteration budget.
double legendre_numeric(const DistributionSpec& dist, double x);

// Closed-form conjugate where one exists (all kinds except TableDiscrete).
std::optional<double> legendre_closed_form(const DistributionSpec& dist, double x);

// Closed form when available, otherwise the numeric path.
double legendre(const DistributionSpec& dist, double x);

// E exp(theta |X1|^v) as an extended real, by closed form, series or
// quadrature depending on the kind.
double abs_moment_exp(const DistributionSpec& dist, double theta, double v);

// Checks whether Lambda is finite on all of R and searches the coarse grid
// theta in {0.1,...,1.0}, v in {1.1, 1.5, 2.0} for a finite exponential
// moment witness; a failed search reports holds=false, never an error.
AssumptionReport check_assumptions(const DistributionSpec& dist);

}  // namespace mdp
