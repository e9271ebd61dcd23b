#pragma once

#include <cstdint>
#include <string_view>

namespace spanchain {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

// Slot duration used for all throughput conversions (IEEE 802.11 unit slot).
inline constexpr double kSlotSeconds = 50e-6;

struct Vec2 {
  double x{0.0};
  double y{0.0};
};

// Smallest L >= 0 with 2^L >= g. Doubling keeps the comparison exact for
// power-of-two g (level_count(8) == 3, level_count(1) == 0).
int level_count(double g);

// Smallest k >= 0 with 2^k >= n.
int ceil_log2(std::uint64_t n);

// splitmix64 step; used to derive independent sub-seeds from a trial seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t tag_of(std::string_view name);

}  // namespace spanchain
