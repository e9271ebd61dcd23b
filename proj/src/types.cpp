#include "spanchain/types.hpp"

#include <limits>
#include <stdexcept>

namespace spanchain {

int level_count(double g) {
  if (!(g >= 1.0) || g > 1e300) {
    throw std::invalid_argument("level_count: ratio must be finite and >= 1");
  }
  int level = 0;
  double reach = 1.0;
  while (reach < g && level < 1024) {
    reach *= 2.0;
    ++level;
  }
  return level;
}

int ceil_log2(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("ceil_log2: n must be positive");
  int k = 0;
  std::uint64_t reach = 1;
  while (reach < n) {
    if (reach > (std::numeric_limits<std::uint64_t>::max() >> 1)) {
      ++k;
      break;
    }
    reach <<= 1;
    ++k;
  }
  return k;
}

namespace {
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed ^ (tag * 0x9E3779B97F4A7C15ULL);
  std::uint64_t out = splitmix64(state);
  out ^= splitmix64(state);
  return out;
}

std::uint64_t tag_of(std::string_view name) {
  // FNV-1a, enough to separate the handful of seed domains we use
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace spanchain
