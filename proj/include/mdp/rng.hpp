#pragma once

#include <cstdint>
#include <random>

namespace mdp {

// SplitMix64 finalizer, used to spread (master seed, stream index) pairs
// into well-separated engine seeds.
uint64_t splitmix64(uint64_t x);

uint64_t stream_seed(uint64_t master_seed, uint64_t stream_index);

// Deterministic random stream. The engine's output sequence is fully
// specified by the standard, so identical seeds reproduce identical draws
// on every platform; all variate transforms live in this project.
class RngStream {
 public:
  RngStream(uint64_t master_seed, uint64_t stream_index)
      : engine_(stream_seed(master_seed, stream_index)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mdp
