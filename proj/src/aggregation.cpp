#include "spanchain/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace spanchain {

double AggregationParams::sigma_bound(const SinrParams& sinr) {
  return 48.0 * sinr.beta * (sinr.alpha - 1.0) / (sinr.alpha - 2.0);
}

double AggregationParams::analytic_p_hat(double sigma, double lambda_prime) {
  const double sl = sigma * lambda_prime;
  return (1.0 / sl) * std::exp(-lambda_prime / (sl - 1.0));
}

AggregationParams AggregationParams::resolved(AggregationParams in,
                                              const SinrParams& sinr) {
  sinr.validate();
  if (in.sigma == 0.0) {
    in.sigma = in.certified ? std::ceil(sigma_bound(sinr)) + 1.0 : 2.0;
  }
  if (in.p_hat_floor == 0.0) {
    in.p_hat_floor = analytic_p_hat(in.sigma, in.lambda_prime);
  }
  if (in.mu == 0.0) {
    in.mu = std::ceil(2.0 / in.p_hat_floor);
  }
  in.validate(sinr);
  return in;
}

void AggregationParams::validate(const SinrParams& sinr) const {
  if (lambda_prime != 25.0) {
    throw std::invalid_argument("aggregation: lambda_prime is fixed at 25");
  }
  if (!(sigma >= 1.0)) {
    throw std::invalid_argument("aggregation: sigma must be >= 1");
  }
  if (certified && !(sigma > sigma_bound(sinr))) {
    throw std::invalid_argument(
        "aggregation: certified mode requires sigma > 48*beta*(alpha-1)/(alpha-2)");
  }
  if (!(p_hat_floor > 0.0) || !(p_hat_floor < 1.0)) {
    throw std::invalid_argument("aggregation: p_hat_floor must be in (0, 1)");
  }
  if (!(mu >= 2.0 / p_hat_floor)) {
    throw std::invalid_argument("aggregation: mu must be >= 2 / p_hat_floor");
  }
  const double p_tx = p();
  if (!(p_tx > 0.0) || !(p_tx <= 1.0)) {
    throw std::invalid_argument("aggregation: transmission probability out of range");
  }
}

std::uint64_t round_slots(const AggregationParams& params, std::size_t n) {
  return static_cast<std::uint64_t>(params.mu) *
         static_cast<std::uint64_t>(ceil_log2(n));
}

std::uint64_t aggregation_budget(const AggregationParams& params, std::size_t n,
                                 int levels) {
  return round_slots(params, n) * static_cast<std::uint64_t>(levels);
}

namespace {

RoleInfo role_in_spanner(const Spanner& s, NodeId v) {
  if (v == s.collector()) return {Role::kCollector, s.top_level()};
  const auto* par = s.parentage(v);
  return {Role::kFollower, par != nullptr ? par->level : 0};
}

Kindred kindred_in_spanner(const Spanner& s, NodeId v) {
  const auto* par = s.parentage(v);
  return {v, par != nullptr ? par->parent : kNoNode};
}

// Receiver-side validity: signer tag plus kindred/role consistency with the
// current spanner and round.
bool transmission_valid(const Spanner& s, const Message& wrapper, NodeId sender,
                        NodeId receiver, int round) {
  if (!msg_signature_ok(wrapper)) return false;
  if (wrapper.kindred.self != sender) return false;
  const auto* par = s.parentage(sender);
  if (par == nullptr || par->parent != receiver || par->level != round) return false;
  if (wrapper.kindred.parent != par->parent) return false;
  if (wrapper.role.level != round) return false;
  return true;
}

}  // namespace

AggregationRun data_aggregation(const NodePlacement& placement, const Spanner& spanner,
                                const SinrParams& sinr, const AggregationParams& params,
                                const std::map<NodeId, std::vector<MessageData>>& inputs,
                                SlotClock& clock, std::uint64_t seed, TraceSink* trace) {
  const std::size_t n = placement.size();
  const std::uint64_t slots_per_round = round_slots(params, n);
  const int levels = spanner.top_level();
  const double p_tx = params.p();

  AggregationRun run;
  for (const auto& [v, _] : inputs) {
    if (spanner.member_level(v) < 0) {
      throw std::invalid_argument("data_aggregation: input from a node outside the spanner");
    }
  }
  for (NodeId v : spanner.levels().front()) {
    if (!clock.alive().is_up(v)) continue;
    MessageQueue& q = run.queues[v];
    auto it = inputs.find(v);
    if (it == inputs.end()) continue;
    for (const MessageData& d : it->second) {
      if (d.signer != v) {
        throw std::invalid_argument("data_aggregation: input signed by another node");
      }
      q.add(make_msg(d, clock.now(), kindred_in_spanner(spanner, v),
                     role_in_spanner(spanner, v)));
    }
  }

  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> tx_count(slots_per_round, p_tx);
  std::uniform_int_distribution<std::uint64_t> tx_slot(0, slots_per_round - 1);

  for (int round = 1; round <= levels; ++round) {
    const std::uint64_t round_start = clock.now();
    const double power = transmit_power(sinr, round);

    // transmitters this round: alive members of V_{round-1} \ V_round holding
    // a nonempty queue; their transmission slots are drawn up front
    std::map<std::uint64_t, std::vector<NodeId>> busy;
    for (NodeId v : spanner.levels()[round - 1]) {
      if (spanner.contains(v, round)) continue;
      if (!clock.alive().is_up(v)) continue;
      auto qit = run.queues.find(v);
      if (qit == run.queues.end() || qit->second.empty()) continue;
      const std::uint64_t count = tx_count(rng);
      std::set<std::uint64_t> offsets;
      while (offsets.size() < count) offsets.insert(tx_slot(rng));
      for (std::uint64_t off : offsets) busy[off].push_back(v);
    }

    if (trace != nullptr) {
      trace->row(round_start, "round_start", kNoNode,
                 "level=" + std::to_string(round) +
                     " busy_slots=" + std::to_string(busy.size()));
    }

    for (const auto& [offset, scheduled] : busy) {
      clock.advance_to(round_start + 1 + offset);

      std::vector<TransmissionIntent> intents;
      std::vector<NodeId> listeners;
      for (NodeId u : scheduled) {
        if (!clock.alive().is_up(u)) continue;
        intents.push_back({u, power, u});
        const auto* par = spanner.parentage(u);
        if (par != nullptr && clock.alive().is_up(par->parent)) {
          listeners.push_back(par->parent);
        }
      }
      if (intents.empty() || listeners.empty()) continue;
      std::sort(listeners.begin(), listeners.end());
      listeners.erase(std::unique(listeners.begin(), listeners.end()), listeners.end());

      SlotOutcome slot = resolve_slot(placement, sinr, intents, listeners);
      for (const auto& [v, decodes] : slot.received) {
        for (const auto& [u, payload] : decodes) {
          Message wrapper = make_msg(MessageData::of_control(u, "queue"), clock.now(),
                                     kindred_in_spanner(spanner, u),
                                     role_in_spanner(spanner, u));
          if (!transmission_valid(spanner, wrapper, u, v, round)) continue;
          run.queues[v].merge(run.queues[u]);
          if (trace != nullptr) trace->row(clock.now(), "decode", v, "from=" + std::to_string(u));
        }
      }
    }
    clock.advance_to(round_start + slots_per_round);
    run.slots_used += slots_per_round;
  }

  const NodeId collector = spanner.collector();
  if (auto it = run.queues.find(collector); it != run.queues.end()) {
    run.collector_queue = it->second;
  }
  return run;
}

ReaggregationRun reaggregation(const NodePlacement& placement, const Spanner& spanner,
                               NodeId leader, MessageQueue& leader_queue,
                               const SinrParams& sinr, const AggregationParams& params,
                               const SpannerConfig& spanner_cfg,
                               const std::map<NodeId, std::vector<MessageData>>& inputs,
                               SlotClock& clock, std::uint64_t seed, TraceSink* trace) {
  const std::uint64_t entry_slot = clock.now();
  const double p_hat = broadcast_power(sinr, placement.gamma());
  const std::size_t f = placement.size() / 2;
  const std::uint64_t pass_cap = static_cast<std::uint64_t>(f) + 1;

  ReaggregationRun run;
  const Spanner* current = &spanner;

  for (;;) {
    // slot one: leader broadcasts its queue
    clock.step();
    if (!clock.alive().is_up(leader)) {
      run.status = ReaggStatus::kLeaderLost;
      break;
    }
    ++run.integrity_checks;
    std::vector<NodeId> others;
    for (NodeId v : clock.alive().up_sorted()) {
      if (v != leader) others.push_back(v);
    }
    SlotOutcome bcast = resolve_slot(placement, sinr, {{leader, p_hat, 0}}, others);

    // snapshot of the payloads the leader currently holds
    std::vector<const MessageData*> snapshot;
    for (const Message& m : leader_queue) snapshot.push_back(&m.data);
    auto in_snapshot = [&](const MessageData& d) {
      for (const MessageData* s : snapshot) {
        if (*s == d) return true;
      }
      return false;
    };

    // slot two: nodes whose data is missing object at full power
    clock.step();
    std::vector<TransmissionIntent> misses;
    std::set<NodeId> missing_nodes;
    for (NodeId v : others) {
      if (!clock.alive().is_up(v)) continue;
      auto rx = bcast.received.find(v);
      const bool got_broadcast =
          rx != bcast.received.end() && !rx->second.empty();
      if (!got_broadcast) continue;
      auto it = inputs.find(v);
      if (it == inputs.end()) continue;
      for (const MessageData& d : it->second) {
        if (!in_snapshot(d)) {
          misses.push_back({v, p_hat, v});
          missing_nodes.insert(v);
          break;
        }
      }
    }
    bool sensed_objection = false;
    if (clock.alive().is_up(leader)) {
      SlotOutcome object_slot = resolve_slot(placement, sinr, misses, {leader});
      sensed_objection = carrier_sense(object_slot, leader, sinr.noise);
    }

    // slot three: reaggregation or stop control
    clock.step();
    if (!clock.alive().is_up(leader)) {
      run.status = ReaggStatus::kLeaderLost;
      break;
    }
    if (!sensed_objection) {
      if (trace != nullptr) trace->row(clock.now(), "reagg_stop", leader);
      run.status = ReaggStatus::kStopped;
      break;
    }
    if (run.integrity_checks >= pass_cap) {
      run.status = ReaggStatus::kIterationCapExceeded;
      break;
    }
    if (trace != nullptr) {
      trace->row(clock.now(), "reagg_trigger", leader,
                 "missing=" + std::to_string(missing_nodes.size()));
    }

    // rebuild over the current alive set; the leader holds the line as the
    // forced collector, so re-collected data lands at the leader directly
    ++run.rebuilds;
    Spanner next = build_spanner(placement, clock.alive().up_sorted(), spanner_cfg,
                                 sinr, mix_seed(seed, run.rebuilds), leader);
    clock.consume(next.construction_slots());
    run.rebuilt = std::move(next);
    current = &*run.rebuilt;

    std::map<NodeId, std::vector<MessageData>> reagg_inputs;
    for (const auto& [v, data] : inputs) {
      if (v == leader || !clock.alive().is_up(v)) continue;
      std::vector<MessageData> still_missing;
      for (const MessageData& d : data) {
        if (!in_snapshot(d)) still_missing.push_back(d);
      }
      if (!still_missing.empty()) reagg_inputs[v] = std::move(still_missing);
    }

    AggregationRun pass = data_aggregation(placement, *current, sinr, params,
                                           reagg_inputs, clock,
                                           mix_seed(seed, 0x5000 + run.rebuilds), trace);
    if (clock.alive().is_up(leader)) {
      auto qit = pass.queues.find(leader);
      if (qit != pass.queues.end()) leader_queue.merge(qit->second);
    }
  }

  run.slots_used = clock.now() - entry_slot;
  return run;
}

}  // namespace spanchain
