#include "mdp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdp {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0,1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
              67265.770927008700853) * r + 45921.953931549871457) * r +
            13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608);
    const double den =
        (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
              39307.89580009271061) * r + 21213.794301586595867) * r +
            5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
    value = num / den;
  }
  return (q < 0.0) ? -value : value;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_cdf(double x, double mean, double variance) {
  if (variance <= 0.0) return x < mean ? 0.0 : 1.0;
  return normal_cdf((x - mean) / std::sqrt(variance));
}

WilsonInterval wilson_interval(int64_t k, int64_t n, double z) {
  if (n <= 0 || k < 0 || k > n) {
    throw std::domain_error("wilson_interval: need 0 <= k <= n, n > 0");
  }
  const double nn = static_cast<double>(n);
  const double p_hat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p_hat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
  double lo = center - half;
  double hi = center + half;
  if (k == 0) lo = 0.0;
  if (k == n) hi = 1.0;
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

double ks_distance_to_normal(std::vector<double> sample, double mean, double variance) {
  if (sample.empty()) throw std::domain_error("ks_distance_to_normal: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double dist = 0.0;
  for (size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i], mean, variance);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    dist = std::max(dist, std::max(std::abs(f - lo), std::abs(f - hi)));
  }
  return dist;
}

std::vector<double> isotonic_non_decreasing(std::span<const double> y) {
  // Pool adjacent violators with unit weights.
  std::vector<double> level;   // pooled block means
  std::vector<size_t> count;   // pooled block sizes
  level.reserve(y.size());
  count.reserve(y.size());
  for (double v : y) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() >= 2 && level[level.size() - 2] > level.back()) {
      const double merged = (level[level.size() - 2] * count[count.size() - 2] +
                             level.back() * count.back()) /
                            static_cast<double>(count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      level[level.size() - 2] = merged;
      level.pop_back();
      count.pop_back();
    }
  }
  std::vector<double> fit;
  fit.reserve(y.size());
  for (size_t b = 0; b < level.size(); ++b) {
    fit.insert(fit.end(), count[b], level[b]);
  }
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::domain_error("median: empty input");
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

}  // namespace mdp
