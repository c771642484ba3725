#include "mdp/rng.hpp"

namespace mdp {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t stream_seed(uint64_t master_seed, uint64_t stream_index) {
  // Two mixing rounds so that consecutive stream indices land far apart.
  return splitmix64(splitmix64(master_seed) ^ splitmix64(stream_index * 0x9e3779b97f4a7c15ULL + 1));
}

}  // namespace mdp
