#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "spanchain/deployment.hpp"
#include "spanchain/types.hpp"

namespace spanchain {

struct SinrParams {
  double alpha{3.0};  // path-loss exponent, in (2, 6]
  double beta{3.0};   // SINR threshold, > 1
  double noise{1.0};  // ambient noise power, > 0

  void validate() const;
};

struct TransmissionIntent {
  NodeId sender{kNoNode};
  double power{0.0};
  std::uint64_t payload{0};  // opaque message reference
};

/// Per-slot resolution: which payloads each listener decoded and the total
/// energy it sensed. Nodes that transmitted this slot never appear as
/// listeners (half-duplex).
struct SlotOutcome {
  std::map<NodeId, std::vector<std::pair<NodeId, std::uint64_t>>> received;
  std::map<NodeId, double> sensed_energy;
};

SlotOutcome resolve_slot(const NodePlacement& placement, const SinrParams& params,
                         const std::vector<TransmissionIntent>& intents,
                         const std::vector<NodeId>& listeners);

// True iff the listener's sensed energy exceeds the threshold. Throws if v was
// not a listener in the slot.
bool carrier_sense(const SlotOutcome& outcome, NodeId v, double threshold);

// Round-i transmission power P_i = 2*noise*beta*(2^i)^alpha.
double transmit_power(const SinrParams& params, int level);

// Max power for whole-network broadcast: 2*noise*beta*(2^ceil(log2 gamma))^alpha.
double broadcast_power(const SinrParams& params, double gamma);

}  // namespace spanchain
