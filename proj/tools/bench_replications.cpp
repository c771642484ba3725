// Timing comparison between the serial reference replication loop and the
// OpenMP kernel, with a bitwise equality check of their outputs.

#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mdp/montecarlo.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  mdp::ExperimentConfig config;
  config.dist = mdp::DistributionSpec::poisson(1.0);
  config.n = 2000;
  config.r = 0.25;
  config.an_exponent = 0.9;
  config.replications = 20000;
  config.master_seed = 42;
  config.t_grid = mdp::default_t_grid(config.dist, config.n, config.r, config.an_exponent,
                                      config.replications);
  if (argc > 1 && std::strcmp(argv[1], "--small") == 0) {
    config.n = 200;
    config.replications = 2000;
  }

  auto t0 = std::chrono::steady_clock::now();
  const auto serial = mdp::scaled_deviations_serial(config);
  const double t_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  const auto parallel = mdp::scaled_deviations(config);
  const double t_parallel = seconds_since(t0);

  bool identical = serial.size() == parallel.size();
  for (size_t i = 0; identical && i < serial.size(); ++i) {
    identical = serial[i].censored == parallel[i].censored &&
                serial[i].value == parallel[i].value;
  }

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("replications: %lld  n: %lld\n",
              static_cast<long long>(config.replications),
              static_cast<long long>(config.n));
  std::printf("serial:   %.3f s\n", t_serial);
  std::printf("parallel: %.3f s  (%d threads, speedup %.2fx)\n", t_parallel, threads,
              t_serial / t_parallel);
  std::printf("outputs bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
