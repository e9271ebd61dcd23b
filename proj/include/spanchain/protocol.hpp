#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spanchain/aggregation.hpp"
#include "spanchain/crash.hpp"
#include "spanchain/ledger.hpp"
#include "spanchain/spanner.hpp"
#include "spanchain/trace.hpp"

namespace spanchain {

struct ProtocolParams {
  std::size_t s_constant{100};  // recovery depth constant in extract()
  std::uint32_t tx_per_node{1};
  double invalid_rate{0.0};  // fraction of transactions flagged invalid
};

enum class EpochOutcome { kCommitted, kAbandoned };

struct EpochResult {
  EpochOutcome outcome{EpochOutcome::kAbandoned};
  NodeId leader{kNoNode};
  std::uint64_t epoch_slots{0};
  std::uint64_t committed_txs{0};
  std::size_t faulty_count{0};    // crashed this epoch or stale view at epoch end
  std::uint64_t rebuilds{0};      // reaggregation spanner reconstructions
  std::string abandon_reason;     // empty when committed
};

/// One simulated network run: per-node chains, a global slot clock and the
/// per-epoch PREPARE/COMMIT/DECIDE machine.
class Trial {
 public:
  Trial(const NodePlacement& placement, const SinrParams& sinr,
        const AggregationParams& agg, const SpannerConfig& spanner_cfg,
        const ProtocolParams& protocol, CrashModel* crashes, std::uint64_t seed,
        TraceSink* trace = nullptr);

  EpochResult run_epoch();

  std::uint64_t epoch_index() const { return epoch_; }
  std::uint64_t now() const { return clock_.now(); }
  const Blockchain& chain(NodeId v) const { return chains_.at(v); }
  const View& latest_view() const { return latest_view_; }
  const SlotClock& clock() const { return clock_; }

  // closed-form crash-free epoch length: 9 + 2 * mu * ceil(log2 n) * L
  std::uint64_t crash_free_budget() const;
  std::uint64_t last_spanner_levels() const { return last_levels_; }

 private:
  struct PhaseData;
  std::vector<Transaction> make_transactions(NodeId v);

  const NodePlacement& placement_;
  SinrParams sinr_;
  AggregationParams agg_;
  SpannerConfig spanner_cfg_;
  ProtocolParams protocol_;
  SlotClock clock_;
  std::uint64_t seed_;
  TraceSink* trace_;

  std::uint64_t epoch_{0};
  std::vector<Blockchain> chains_;
  View latest_view_;
  std::uint64_t last_levels_{0};
  std::mt19937_64 tx_rng_;
};

}  // namespace spanchain
