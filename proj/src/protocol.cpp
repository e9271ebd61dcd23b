#include "spanchain/protocol.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace spanchain {

Trial::Trial(const NodePlacement& placement, const SinrParams& sinr,
             const AggregationParams& agg, const SpannerConfig& spanner_cfg,
             const ProtocolParams& protocol, CrashModel* crashes,
             std::uint64_t seed, TraceSink* trace)
    : placement_(placement),
      sinr_(sinr),
      agg_(AggregationParams::resolved(agg, sinr)),
      spanner_cfg_(spanner_cfg),
      protocol_(protocol),
      clock_(placement.size(), crashes),
      seed_(seed),
      trace_(trace),
      chains_(placement.size()),
      tx_rng_(mix_seed(seed, tag_of("tx"))) {
  latest_view_ = chains_.front().view();
}

std::uint64_t Trial::crash_free_budget() const {
  const int levels =
      placement_.size() == 1 ? 0 : std::max(1, level_count(placement_.gamma()));
  return 9 + 2 * aggregation_budget(agg_, placement_.size(), levels);
}

std::vector<Transaction> Trial::make_transactions(NodeId v) {
  std::vector<Transaction> txs;
  txs.reserve(protocol_.tx_per_node);
  for (std::uint32_t k = 0; k < protocol_.tx_per_node; ++k) {
    Transaction tx;
    tx.id = {v, epoch_, k};
    std::ostringstream payload;
    payload << "tx-" << v << '-' << epoch_ << '-' << k;
    tx.payload = payload.str();
    tx.valid = true;
    if (protocol_.invalid_rate > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      tx.valid = u(tx_rng_) >= protocol_.invalid_rate;
    }
    txs.push_back(std::move(tx));
  }
  return txs;
}

EpochResult Trial::run_epoch() {
  clock_.epoch_boundary_rejoin();
  ++epoch_;

  EpochResult result;
  const std::size_t n = placement_.size();
  const std::size_t f = n / 2;
  const double p_hat = broadcast_power(sinr_, placement_.gamma());

  // a fresh spanner over the (fully rejoined) alive set; construction happens
  // ahead of the epoch's slot accounting
  Spanner spanner = build_spanner(placement_, clock_.alive().up_sorted(), spanner_cfg_,
                                  sinr_, mix_seed(seed_, tag_of("spanner") + epoch_));
  const NodeId leader = spanner.collector();
  result.leader = leader;
  last_levels_ = static_cast<std::uint64_t>(spanner.top_level());
  const std::uint64_t start_slot = clock_.now();

  auto finish = [&](EpochOutcome outcome, const char* reason) {
    result.outcome = outcome;
    result.abandon_reason = outcome == EpochOutcome::kAbandoned ? reason : "";
    result.epoch_slots = clock_.now() - start_slot;
    std::size_t faulty = clock_.alive().down_count();
    for (NodeId v : clock_.alive().up_sorted()) {
      if (chains_[v].view() != latest_view_) ++faulty;
    }
    result.faulty_count = faulty;
    if (trace_ != nullptr) {
      trace_->row(clock_.now(),
                  outcome == EpochOutcome::kCommitted ? "epoch_committed" : "epoch_abandoned",
                  leader, result.abandon_reason);
    }
    return result;
  };

  auto broadcast_from_leader = [&](std::uint64_t payload) -> bool {
    clock_.step();
    if (!clock_.alive().is_up(leader)) return false;
    std::vector<NodeId> others;
    for (NodeId v : clock_.alive().up_sorted()) {
      if (v != leader) others.push_back(v);
    }
    if (!others.empty()) {
      resolve_slot(placement_, sinr_, {{leader, p_hat, payload}}, others);
    }
    return true;
  };

  // ---- PREPARE ----
  if (!broadcast_from_leader(0)) {
    return finish(EpochOutcome::kAbandoned, "leader lost before view broadcast");
  }
  if (trace_ != nullptr) trace_->row(clock_.now(), "prepare", leader);
  const View leader_view = chains_[leader].view();

  const Spanner* backbone = &spanner;

  std::map<NodeId, std::vector<MessageData>> view_inputs;
  for (NodeId v : clock_.alive().up_sorted()) {
    view_inputs[v] = {MessageData::of_view(v, chains_[v].view())};
  }
  AggregationRun view_pass =
      data_aggregation(placement_, *backbone, sinr_, agg_, view_inputs, clock_,
                       mix_seed(seed_, tag_of("agg_view") + epoch_), trace_);
  MessageQueue leader_views = std::move(view_pass.queues[leader]);
  ReaggregationRun view_reagg = reaggregation(
      placement_, *backbone, leader, leader_views, sinr_, agg_, spanner_cfg_,
      view_inputs, clock_, mix_seed(seed_, tag_of("reagg_view") + epoch_), trace_);
  result.rebuilds += view_reagg.rebuilds;
  if (view_reagg.rebuilt.has_value()) backbone = &*view_reagg.rebuilt;
  if (view_reagg.status == ReaggStatus::kLeaderLost) {
    return finish(EpochOutcome::kAbandoned, "leader lost during view reaggregation");
  }
  if (view_reagg.status == ReaggStatus::kIterationCapExceeded) {
    return finish(EpochOutcome::kAbandoned, "view reaggregation exceeded the f+1 cap");
  }

  // ---- COMMIT ----
  const std::size_t matching =
      leader_views.matching_signers(MessageData::of_view(leader, leader_view));
  if (matching < f + 1) {
    broadcast_from_leader(3);  // abandon control
    return finish(EpochOutcome::kAbandoned, "view quorum not reached");
  }
  if (!broadcast_from_leader(1)) {
    return finish(EpochOutcome::kAbandoned, "leader lost before correct broadcast");
  }
  if (trace_ != nullptr) trace_->row(clock_.now(), "commit", leader);

  std::map<NodeId, std::vector<MessageData>> tx_inputs;
  for (NodeId v : clock_.alive().up_sorted()) {
    std::vector<MessageData> data;
    for (Transaction& tx : make_transactions(v)) {
      data.push_back(MessageData::of_tx(v, std::move(tx)));
    }
    if (!data.empty()) tx_inputs[v] = std::move(data);
  }
  AggregationRun tx_pass =
      data_aggregation(placement_, *backbone, sinr_, agg_, tx_inputs, clock_,
                       mix_seed(seed_, tag_of("agg_tx") + epoch_), trace_);
  MessageQueue leader_txs = std::move(tx_pass.queues[leader]);
  ReaggregationRun tx_reagg = reaggregation(
      placement_, *backbone, leader, leader_txs, sinr_, agg_, spanner_cfg_,
      tx_inputs, clock_, mix_seed(seed_, tag_of("reagg_tx") + epoch_), trace_);
  result.rebuilds += tx_reagg.rebuilds;
  if (tx_reagg.status == ReaggStatus::kLeaderLost) {
    return finish(EpochOutcome::kAbandoned, "leader lost during tx reaggregation");
  }
  if (tx_reagg.status == ReaggStatus::kIterationCapExceeded) {
    return finish(EpochOutcome::kAbandoned, "tx reaggregation exceeded the f+1 cap");
  }

  // ---- DECIDE ----
  clock_.step();
  if (!clock_.alive().is_up(leader)) {
    return finish(EpochOutcome::kAbandoned, "leader lost before decide broadcast");
  }
  BlockPtr block = packup(leader_txs, chains_[leader], leader, epoch_);
  if (!chains_[leader].append(block)) {
    throw std::logic_error("protocol: leader could not append its own block");
  }
  const std::vector<BlockPtr> suffix =
      extract(chains_[leader], leader_views, f, protocol_.s_constant);

  std::vector<NodeId> others;
  for (NodeId v : clock_.alive().up_sorted()) {
    if (v != leader) others.push_back(v);
  }
  if (!others.empty()) {
    SlotOutcome decide =
        resolve_slot(placement_, sinr_, {{leader, p_hat, 2}}, others);
    for (NodeId v : others) {
      auto rx = decide.received.find(v);
      if (rx == decide.received.end() || rx->second.empty()) continue;
      update(chains_[v], suffix);
    }
  }
  latest_view_ = chains_[leader].view();
  result.committed_txs = block->txs.size();
  if (trace_ != nullptr) trace_->row(clock_.now(), "decide", leader);
  return finish(EpochOutcome::kCommitted, "");
}

}  // namespace spanchain
