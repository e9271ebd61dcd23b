#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "spanchain/crash.hpp"
#include "spanchain/ledger.hpp"
#include "spanchain/message.hpp"
#include "spanchain/phy.hpp"
#include "spanchain/spanner.hpp"
#include "spanchain/trace.hpp"
#include "spanchain/types.hpp"

namespace spanchain {

struct AggregationParams {
  // contention constant; 0 resolves to the mode default (certified:
  // ceil(48*beta*(alpha-1)/(alpha-2)) + 1, empirical: 2)
  double sigma{0.0};
  double lambda_prime{25.0};
  // round-length constant; 0 resolves to ceil(2 / p_hat_floor)
  double mu{0.0};
  // sole-transmitter success-probability floor; 0 resolves to the analytic
  // (sigma*lambda')^{-1} * exp(-lambda'/(sigma*lambda'-1))
  double p_hat_floor{0.0};
  // certified mode enforces the analytic sigma lower bound at validation
  bool certified{true};

  double p() const { return 1.0 / (sigma * lambda_prime); }
  static double sigma_bound(const SinrParams& sinr);
  static double analytic_p_hat(double sigma, double lambda_prime);

  // fills in the zero fields from the mode defaults and validates
  static AggregationParams resolved(AggregationParams in, const SinrParams& sinr);
  void validate(const SinrParams& sinr) const;
};

// Slots in one aggregation round: mu * ceil(log2 n).
std::uint64_t round_slots(const AggregationParams& params, std::size_t n);
// Slots in a full pass: round_slots * top_level.
std::uint64_t aggregation_budget(const AggregationParams& params, std::size_t n,
                                 int levels);

struct AggregationRun {
  MessageQueue collector_queue;
  std::uint64_t slots_used{0};
  std::map<NodeId, MessageQueue> queues;  // final per-node queues
};

/// Algorithm-2 pass: level-by-level contention aggregation along the spanner.
/// Nodes seed their queue from `inputs` (a node with no entry stays silent
/// until it holds relayed data). Crashes fire through the clock mid-run.
AggregationRun data_aggregation(const NodePlacement& placement, const Spanner& spanner,
                                const SinrParams& sinr, const AggregationParams& params,
                                const std::map<NodeId, std::vector<MessageData>>& inputs,
                                SlotClock& clock, std::uint64_t seed,
                                TraceSink* trace = nullptr);

enum class ReaggStatus { kStopped, kLeaderLost, kIterationCapExceeded };

struct ReaggregationRun {
  ReaggStatus status{ReaggStatus::kStopped};
  std::uint64_t slots_used{0};
  std::uint64_t integrity_checks{0};  // loop passes (>= 1 when the leader survives)
  std::uint64_t rebuilds{0};          // spanner reconstructions triggered
  std::optional<Spanner> rebuilt;     // last rebuilt spanner, if any
};

/// Integrity-check loop: three slots (leader queue broadcast, miss
/// contention sensed by the leader, reaggregation/stop control), then a
/// rebuild over the survivors with the leader held as collector plus a
/// re-collection pass, repeated while any live node's data is missing.
/// Capped at f+1 passes. `rebuilt` carries the newest backbone so the caller
/// can run later phases on a tree free of the crashed nodes.
ReaggregationRun reaggregation(const NodePlacement& placement, const Spanner& spanner,
                               NodeId leader, MessageQueue& leader_queue,
                               const SinrParams& sinr, const AggregationParams& params,
                               const SpannerConfig& spanner_cfg,
                               const std::map<NodeId, std::vector<MessageData>>& inputs,
                               SlotClock& clock, std::uint64_t seed,
                               TraceSink* trace = nullptr);

}  // namespace spanchain
