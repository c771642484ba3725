#include "mdp/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "mdp/errors.hpp"
#include "mdp/format.hpp"
#include "mdp/stats.hpp"

namespace mdp {

namespace {

// Largest per-chunk rate for Poisson inversion sampling; keeps exp(-lambda)
// well above the underflow threshold.
constexpr double kPoissonChunk = 30.0;

int64_t poisson_inversion(double lambda, RngStream& rng) {
  const double u = rng.uniform01();
  double p = std::exp(-lambda);
  double cum = p;
  int64_t k = 0;
  const int64_t cap = static_cast<int64_t>(lambda + 60.0 * std::sqrt(lambda) + 60.0);
  while (u > cum && k < cap) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cum += p;
  }
  return k;
}

double table_log_mgf(const std::vector<std::pair<double, double>>& atoms, double a) {
  // log sum p_i exp(a v_i), shifted by the max exponent.
  double shift = -kInfinity;
  for (const auto& [v, p] : atoms) {
    if (p > 0.0) shift = std::max(shift, a * v);
  }
  double acc = 0.0;
  for (const auto& [v, p] : atoms) {
    if (p > 0.0) acc += p * std::exp(a * v - shift);
  }
  return shift + std::log(acc);
}

// Tilted mean and variance of a table law at parameter a.
void table_tilted_moments(const std::vector<std::pair<double, double>>& atoms, double a,
                          double* mean, double* var) {
  double shift = -kInfinity;
  for (const auto& [v, p] : atoms) {
    if (p > 0.0) shift = std::max(shift, a * v);
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (const auto& [v, p] : atoms) {
    if (p <= 0.0) continue;
    const double w = p * std::exp(a * v - shift);
    z += w;
    m1 += w * v;
    m2 += w * v * v;
  }
  *mean = m1 / z;
  if (var) *var = std::max(0.0, m2 / z - (m1 / z) * (m1 / z));
}

double table_atom_probability(const std::vector<std::pair<double, double>>& atoms,
                              double value) {
  double p = 0.0;
  for (const auto& [v, q] : atoms) {
    if (v == value) p += q;
  }
  return p;
}

}  // namespace

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError("exponential: rate must be positive and finite");
  }
  DistributionSpec d;
  d.kind_ = DistKind::Exponential;
  d.p1_ = rate;
  d.mu_ = 1.0 / rate;
  d.sigma2_ = 1.0 / (rate * rate);
  d.lambda_domain_ = {-kInfinity, rate};
  d.mean_range_ = {0.0, kInfinity};
  return d;
}

DistributionSpec DistributionSpec::poisson(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError("poisson: rate must be positive and finite");
  }
  DistributionSpec d;
  d.kind_ = DistKind::Poisson;
  d.p1_ = rate;
  d.mu_ = rate;
  d.sigma2_ = rate;
  d.lambda_domain_ = {-kInfinity, kInfinity};
  d.mean_range_ = {0.0, kInfinity};
  return d;
}

DistributionSpec DistributionSpec::normal(double mean, double stdev) {
  if (!(stdev > 0.0) || !std::isfinite(stdev) || !std::isfinite(mean)) {
    throw ConfigError("normal: stdev must be positive and both parameters finite");
  }
  DistributionSpec d;
  d.kind_ = DistKind::Normal;
  d.p1_ = mean;
  d.p2_ = stdev;
  d.mu_ = mean;
  d.sigma2_ = stdev * stdev;
  d.lambda_domain_ = {-kInfinity, kInfinity};
  d.mean_range_ = {-kInfinity, kInfinity};
  return d;
}

DistributionSpec DistributionSpec::bernoulli_shifted(double p, double offset) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ConfigError("bernoulli: p must lie strictly in (0,1), degenerate laws rejected");
  }
  if (!std::isfinite(offset)) throw ConfigError("bernoulli: offset must be finite");
  DistributionSpec d;
  d.kind_ = DistKind::BernoulliShifted;
  d.p1_ = p;
  d.p2_ = offset;
  d.mu_ = offset + p;
  d.sigma2_ = p * (1.0 - p);
  d.lambda_domain_ = {-kInfinity, kInfinity};
  d.mean_range_ = {offset, offset + 1.0};
  return d;
}

DistributionSpec DistributionSpec::table(std::vector<std::pair<double, double>> atoms) {
  if (atoms.size() < 2) throw ConfigError("table: need at least two atoms");
  double total = 0.0;
  for (const auto& [v, p] : atoms) {
    if (!std::isfinite(v) || !std::isfinite(p)) throw ConfigError("table: non-finite entry");
    if (p < 0.0) throw ConfigError("table: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("table: probabilities must sum to 1 within 1e-12, got " +
                      format_double(total));
  }
  DistributionSpec d;
  d.kind_ = DistKind::TableDiscrete;
  d.atoms_ = std::move(atoms);
  double m1 = 0.0;
  double vmin = kInfinity, vmax = -kInfinity;
  for (const auto& [v, p] : d.atoms_) {
    m1 += p * v;
    if (p > 0.0) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  double var = 0.0;  // centered form survives tightly clustered atoms
  for (const auto& [v, p] : d.atoms_) var += p * (v - m1) * (v - m1);
  d.mu_ = m1;
  d.sigma2_ = var;
  if (!(d.sigma2_ > 0.0) || vmin == vmax) {
    throw ConfigError("table: law is degenerate (a single effective value)");
  }
  d.lambda_domain_ = {-kInfinity, kInfinity};
  d.mean_range_ = {vmin, vmax};
  return d;
}

std::string DistributionSpec::describe() const {
  switch (kind_) {
    case DistKind::Exponential:
      return "exponential:" + format_double(p1_);
    case DistKind::Poisson:
      return "poisson:" + format_double(p1_);
    case DistKind::Normal:
      return "normal:" + format_double(p1_) + "," + format_double(p2_);
    case DistKind::BernoulliShifted:
      return "bernoulli:" + format_double(p1_) + "," + format_double(p2_);
    case DistKind::TableDiscrete: {
      std::string s = "table:";
      for (size_t i = 0; i < atoms_.size(); ++i) {
        if (i) s += ",";
        s += format_double(atoms_[i].first) + "@" + format_double(atoms_[i].second);
      }
      return s;
    }
  }
  return "?";
}

double sample(const DistributionSpec& dist, RngStream& rng) {
  switch (dist.kind()) {
    case DistKind::Exponential:
      return -std::log(rng.uniform01()) / dist.param1();
    case DistKind::Poisson: {
      double lambda = dist.param1();
      int64_t total = 0;
      while (lambda > kPoissonChunk) {
        total += poisson_inversion(kPoissonChunk, rng);
        lambda -= kPoissonChunk;
      }
      total += poisson_inversion(lambda, rng);
      return static_cast<double>(total);
    }
    case DistKind::Normal:
      return dist.param1() + dist.param2() * normal_quantile(rng.uniform01());
    case DistKind::BernoulliShifted:
      return dist.param2() + (rng.uniform01() < dist.param1() ? 1.0 : 0.0);
    case DistKind::TableDiscrete: {
      const double u = rng.uniform01();
      double cum = 0.0;
      const auto& atoms = dist.atoms();
      for (const auto& [v, p] : atoms) {
        cum += p;
        if (u <= cum) return v;
      }
      return atoms.back().first;
    }
  }
  return 0.0;
}

double cgf(const DistributionSpec& dist, double a) {
  if (a == 0.0) return 0.0;
  switch (dist.kind()) {
    case DistKind::Exponential: {
      const double rate = dist.param1();
      if (a >= rate) return kInfinity;
      return -std::log1p(-a / rate);
    }
    case DistKind::Poisson:
      return dist.param1() * std::expm1(a);
    case DistKind::Normal:
      return dist.param1() * a + 0.5 * dist.sigma2() * a * a;
    case DistKind::BernoulliShifted: {
      const double p = dist.param1();
      const double c = dist.param2();
      if (a > 700.0) {
        // log(1 - p + p e^a) = a + log p + log1p((1-p) e^-a / p)
        return c * a + a + std::log(p) + std::log1p((1.0 - p) * std::exp(-a) / p);
      }
      return c * a + std::log1p(p * std::expm1(a));
    }
    case DistKind::TableDiscrete:
      return table_log_mgf(dist.atoms(), a);
  }
  return 0.0;
}

double cgf_derivative(const DistributionSpec& dist, double a) {
  switch (dist.kind()) {
    case DistKind::Exponential: {
      const double rate = dist.param1();
      if (a >= rate) return kInfinity;
      return 1.0 / (rate - a);
    }
    case DistKind::Poisson:
      return dist.param1() * std::exp(a);
    case DistKind::Normal:
      return dist.param1() + dist.sigma2() * a;
    case DistKind::BernoulliShifted: {
      const double p = dist.param1();
      // c + 1 / (1 + ((1-p)/p) e^-a), stable for either sign of a.
      return dist.param2() + 1.0 / (1.0 + (1.0 - p) / p * std::exp(-a));
    }
    case DistKind::TableDiscrete: {
      double mean = 0.0;
      table_tilted_moments(dist.atoms(), a, &mean, nullptr);
      return mean;
    }
  }
  return 0.0;
}

double cgf_second_derivative(const DistributionSpec& dist, double a) {
  switch (dist.kind()) {
    case DistKind::Exponential: {
      const double rate = dist.param1();
      if (a >= rate) return kInfinity;
      return 1.0 / ((rate - a) * (rate - a));
    }
    case DistKind::Poisson:
      return dist.param1() * std::exp(a);
    case DistKind::Normal:
      return dist.sigma2();
    case DistKind::BernoulliShifted: {
      const double q = cgf_derivative(dist, a) - dist.param2();
      return q * (1.0 - q);
    }
    case DistKind::TableDiscrete: {
      double mean = 0.0, var = 0.0;
      table_tilted_moments(dist.atoms(), a, &mean, &var);
      return var;
    }
  }
  return 0.0;
}

namespace {

// Conjugate value at a finite boundary point of the closure of Lambda''s
// range: lim a->-inf of (a x_min - Lambda(a)) equals -log P(X = x_min)
// (and symmetrically at the top). +infinity when the boundary carries no atom.
double boundary_conjugate(const DistributionSpec& dist, double x, bool lower) {
  switch (dist.kind()) {
    case DistKind::Exponential:
      return kInfinity;  // P(X = 0) = 0
    case DistKind::Poisson:
      return lower ? dist.param1() : kInfinity;  // -log P(X=0) = lambda
    case DistKind::Normal:
      return kInfinity;  // unbounded range, never reached
    case DistKind::BernoulliShifted:
      return lower ? -std::log(1.0 - dist.param1()) : -std::log(dist.param1());
    case DistKind::TableDiscrete: {
      const double p = table_atom_probability(dist.atoms(), x);
      return p > 0.0 ? -std::log(p) : kInfinity;
    }
  }
  return kInfinity;
}

}  // namespace

double legendre_numeric(const DistributionSpec& dist, double x) {
  const Interval& range = dist.mean_range();
  if (x < range.lo || x > range.hi) return kInfinity;
  if (x == range.lo) return boundary_conjugate(dist, x, true);
  if (x == range.hi) return boundary_conjugate(dist, x, false);

  // Bracket a solution of Lambda'(a) = x between the domain endpoints,
  // stepping geometrically toward infinite ends and halving the gap toward
  // finite ones.
  const Interval& dom = dist.lambda_domain();
  double lo = -1.0, hi = 1.0;
  if (std::isfinite(dom.lo)) lo = dom.lo + 0.5 * std::max(1.0, std::abs(dom.lo));
  if (std::isfinite(dom.hi)) hi = dom.hi - 0.5 * std::max(1.0, std::abs(dom.hi));
  for (int i = 0; i < 200 && cgf_derivative(dist, lo) >= x; ++i) {
    lo = std::isfinite(dom.lo) ? dom.lo + 0.5 * (lo - dom.lo) : 2.0 * lo - std::max(1.0, std::abs(lo));
  }
  for (int i = 0; i < 200 && cgf_derivative(dist, hi) <= x; ++i) {
    hi = std::isfinite(dom.hi) ? dom.hi - 0.5 * (dom.hi - hi) : 2.0 * hi + std::max(1.0, std::abs(hi));
  }
  if (!(cgf_derivative(dist, lo) < x && cgf_derivative(dist, hi) > x)) {
    throw ConvergenceFailure("legendre: failed to bracket Lambda'(a) = " + format_double(x));
  }

  const double tol = 1e-10 * std::max(1.0, std::abs(x));
  double a = 0.5 * (lo + hi);
  double resid = cgf_derivative(dist, a) - x;
  for (int it = 0; it < 200; ++it) {
    if (std::abs(resid) <= tol) return a * x - cgf(dist, a);
    if (resid > 0.0) {
      hi = a;
    } else {
      lo = a;
    }
    const double curv = cgf_second_derivative(dist, a);
    double next = a - resid / curv;
    if (!(std::isfinite(next) && next > lo && next < hi)) {
      next = 0.5 * (lo + hi);  // bisection fallback
    }
    a = next;
    resid = cgf_derivative(dist, a) - x;
  }
  throw ConvergenceFailure("legendre: no convergence at x = " + format_double(x));
}

std::optional<double> legendre_closed_form(const DistributionSpec& dist, double x) {
  switch (dist.kind()) {
    case DistKind::Exponential: {
      const double rate = dist.param1();
      if (x <= 0.0) return kInfinity;
      return rate * x - 1.0 - std::log(rate * x);
    }
    case DistKind::Poisson: {
      const double rate = dist.param1();
      if (x < 0.0) return kInfinity;
      if (x == 0.0) return rate;
      return x * std::log(x / rate) - x + rate;
    }
    case DistKind::Normal: {
      const double d = x - dist.mu();
      return d * d / (2.0 * dist.sigma2());
    }
    case DistKind::BernoulliShifted: {
      const double p = dist.param1();
      const double q = x - dist.param2();
      if (q < 0.0 || q > 1.0) return kInfinity;
      if (q == 0.0) return -std::log(1.0 - p);
      if (q == 1.0) return -std::log(p);
      return q * std::log(q / p) + (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
    }
    case DistKind::TableDiscrete:
      return std::nullopt;
  }
  return std::nullopt;
}

double legendre(const DistributionSpec& dist, double x) {
  if (auto closed = legendre_closed_form(dist, x)) return *closed;
  return legendre_numeric(dist, x);
}

namespace {

// log E exp(theta |X|^v) for a continuous density by windowed composite
// Simpson around the peak of the log-integrand h. `h` must be unimodal on
// each side of zero.
double log_exp_moment_by_quadrature(double theta, double v, double mean, double stdev) {
  auto h = [&](double x) {
    const double z = (x - mean) / stdev;
    return theta * std::pow(std::abs(x), v) - 0.5 * z * z;
  };
  auto side_log_integral = [&](double sign) {
    // Locate the peak by golden-section on [eps, B] in the sign direction.
    double lo = 1e-12, hi = 1.0;
    while (h(sign * hi) >= h(sign * hi * 0.5) && hi < 1e12) hi *= 2.0;
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
      const double m1 = a + 0.381966011250105 * (b - a);
      const double m2 = b - 0.381966011250105 * (b - a);
      if (h(sign * m1) < h(sign * m2)) {
        a = m1;
      } else {
        b = m2;
      }
    }
    const double peak = 0.5 * (a + b);
    const double hmax = h(sign * peak);
    // Expand the window until the integrand is negligible relative to peak.
    double left = peak, right = peak;
    while (left > 1e-12 && h(sign * left) > hmax - 80.0) left *= 0.5;
    while (h(sign * right) > hmax - 80.0 && right < 1e14) right = right * 2.0 + 1.0;
    const int n = 4000;  // composite Simpson, even count
    const double dx = (right - left) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = left + dx * i;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * std::exp(h(sign * x) - hmax);
    }
    return hmax + std::log(acc * dx / 3.0);
  };
  const double lp = side_log_integral(1.0);
  const double lm = side_log_integral(-1.0);
  const double m = std::max(lp, lm);
  const double norm = std::log(stdev * std::sqrt(2.0 * M_PI));
  return m + std::log1p(std::exp(std::min(lp, lm) - m)) - norm;
}

}  // namespace

double abs_moment_exp(const DistributionSpec& dist, double theta, double v) {
  if (!(theta > 0.0) || !(v >= 1.0)) {
    throw ConfigError("abs_moment_exp: need theta > 0 and v >= 1");
  }
  switch (dist.kind()) {
    case DistKind::Exponential:
      // exp(theta x^v - rate x) is unbounded for v > 1, integrable for v = 1
      // only when theta < rate.
      if (v > 1.0) return kInfinity;
      return theta < dist.param1() ? dist.param1() / (dist.param1() - theta) : kInfinity;
    case DistKind::Poisson: {
      // Series terms exp(theta k^v - log k! + k log lambda) eventually grow
      // without bound for any v > 1: the log-ratio theta v k^{v-1} - log k
      // tends to +infinity. Only v = 1 converges.
      if (v > 1.0) return kInfinity;
      return std::exp(dist.param1() * std::expm1(theta));
    }
    case DistKind::Normal: {
      const double m = dist.param1();
      const double s = dist.param2();
      if (v == 2.0) {
        // E exp(theta X^2) = (1 - 2 theta s^2)^{-1/2} exp(theta m^2 / (1 - 2 theta s^2))
        const double c = 1.0 - 2.0 * theta * s * s;
        if (c <= 0.0) return kInfinity;
        return std::exp(theta * m * m / c) / std::sqrt(c);
      }
      const double lv = log_exp_moment_by_quadrature(theta, v, m, s);
      return lv > 700.0 ? kInfinity : std::exp(lv);
    }
    case DistKind::BernoulliShifted: {
      const double p = dist.param1();
      const double c = dist.param2();
      const double e0 = theta * std::pow(std::abs(c), v);
      const double e1 = theta * std::pow(std::abs(c + 1.0), v);
      if (e0 > 700.0 || e1 > 700.0) return kInfinity;
      return (1.0 - p) * std::exp(e0) + p * std::exp(e1);
    }
    case DistKind::TableDiscrete: {
      double sum = 0.0;
      for (const auto& [val, p] : dist.atoms()) {
        if (p <= 0.0) continue;
        const double e = theta * std::pow(std::abs(val), v);
        if (e > 700.0) return kInfinity;
        sum += p * std::exp(e);
      }
      return sum;
    }
  }
  return kInfinity;
}

AssumptionReport check_assumptions(const DistributionSpec& dist) {
  AssumptionReport report;
  const Interval& dom = dist.lambda_domain();
  report.assumption1_holds = !std::isfinite(dom.lo) && !std::isfinite(dom.hi);
  if (report.assumption1_holds) {
    report.assumption1_detail = "Lambda(a) finite for all real a";
  } else {
    std::string lo = std::isfinite(dom.lo) ? format_double(dom.lo) : "-inf";
    std::string hi = std::isfinite(dom.hi) ? format_double(dom.hi) : "+inf";
    report.assumption1_detail = "Lambda(a)=+inf outside (" + lo + ", " + hi + ")";
  }

  // Witness search on the coarse grid, preferring the largest v that admits
  // a finite bound; within a v, the bound b = log E exp(theta |X|^v) grows
  // with theta, so the smallest b sits at the smallest workable theta.
  const double vs[] = {2.0, 1.5, 1.1};
  for (double v : vs) {
    std::optional<Assumption2Witness> best;
    for (int i = 1; i <= 10; ++i) {
      const double theta = 0.1 * i;
      const double value = abs_moment_exp(dist, theta, v);
      if (std::isfinite(value)) {
        const double b = std::log(value);
        if (!best || b < best->b) best = Assumption2Witness{theta, v, b};
      }
    }
    if (best) {
      report.assumption2_holds = true;
      report.assumption2_witness = best;
      break;
    }
  }
  return report;
}

}  // namespace mdp
