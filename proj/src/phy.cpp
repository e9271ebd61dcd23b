#include "spanchain/phy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spanchain {

void SinrParams::validate() const {
  if (!(alpha > 2.0) || !(alpha <= 6.0)) {
    throw std::invalid_argument("sinr: alpha must be in (2, 6]");
  }
  if (!(beta > 1.0)) throw std::invalid_argument("sinr: beta must be > 1");
  if (!(noise > 0.0)) throw std::invalid_argument("sinr: noise must be > 0");
}

SlotOutcome resolve_slot(const NodePlacement& placement, const SinrParams& params,
                         const std::vector<TransmissionIntent>& intents,
                         const std::vector<NodeId>& listeners) {
  params.validate();
  std::set<NodeId> senders;
  for (const TransmissionIntent& t : intents) {
    if (t.sender >= placement.size()) {
      throw std::out_of_range("resolve_slot: sender id out of range");
    }
    if (!(t.power > 0.0)) {
      throw std::invalid_argument("resolve_slot: transmit power must be > 0");
    }
    if (!senders.insert(t.sender).second) {
      throw std::invalid_argument("resolve_slot: duplicate sender in one slot");
    }
  }

  SlotOutcome out;
  for (NodeId v : listeners) {
    if (v >= placement.size()) {
      throw std::out_of_range("resolve_slot: listener id out of range");
    }
    if (senders.count(v)) continue;  // half-duplex

    std::vector<double> rx(intents.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < intents.size(); ++k) {
      const double d = placement.distance(intents[k].sender, v);
      rx[k] = intents[k].power * std::pow(d, -params.alpha);
      total += rx[k];
    }
    out.sensed_energy[v] = total;

    auto& decoded = out.received[v];
    for (std::size_t k = 0; k < intents.size(); ++k) {
      const double interference = total - rx[k];
      const double sinr = rx[k] / (params.noise + interference);
      if (sinr >= params.beta) {
        decoded.emplace_back(intents[k].sender, intents[k].payload);
      }
    }
  }
  return out;
}

bool carrier_sense(const SlotOutcome& outcome, NodeId v, double threshold) {
  auto it = outcome.sensed_energy.find(v);
  if (it == outcome.sensed_energy.end()) {
    throw std::invalid_argument("carrier_sense: node was not a listener");
  }
  return it->second > threshold;
}

double transmit_power(const SinrParams& params, int level) {
  if (level < 0) throw std::invalid_argument("transmit_power: level must be >= 0");
  return 2.0 * params.noise * params.beta * std::pow(std::exp2(level), params.alpha);
}

double broadcast_power(const SinrParams& params, double gamma) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("broadcast_power: gamma must be >= 1");
  return transmit_power(params, level_count(gamma));
}

}  // namespace spanchain
