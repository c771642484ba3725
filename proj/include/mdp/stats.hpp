#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mdp {

// Inverse standard normal CDF (Wichura's AS241 rational approximations).
// Requires p in (0,1).
double normal_quantile(double p);

// Standard normal CDF.
double normal_cdf(double z);

// CDF of Normal(mean, variance).
double normal_cdf(double x, double mean, double variance);

struct WilsonInterval {
  double low;
  double high;
};

// Wilson score interval for a binomial proportion k/n. Defaults to the
// 95% level. Stable at k = 0 and k = n.
WilsonInterval wilson_interval(int64_t k, int64_t n, double z = 1.959963984540054);

// Kolmogorov-Smirnov sup distance between the empirical CDF of `sample`
// and the Normal(mean, variance) CDF. Takes the sample by value and sorts it.
double ks_distance_to_normal(std::vector<double> sample, double mean, double variance);

// Least-squares non-decreasing fit (pool adjacent violators).
std::vector<double> isotonic_non_decreasing(std::span<const double> y);

// Median, averaging the middle pair for even sizes. Takes a copy.
double median(std::vector<double> v);

}  // namespace mdp
