#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "spanchain/deployment.hpp"
#include "spanchain/phy.hpp"
#include "spanchain/types.hpp"

namespace spanchain {

enum class SpannerMode { kOracle, kDistributed };

SpannerMode spanner_mode_from_string(const std::string& name);
std::string to_string(SpannerMode m);

struct SpannerConfig {
  SpannerMode mode{SpannerMode::kOracle};
  // oracle mode charges c_span * ceil(log2 n) slots per level
  int c_span{4};
  // distributed-mode contention probability; 0 means the caller fills it in
  // (the harness uses the aggregation transmission probability)
  double contend_p{0.0};
};

/// Leveled MIS hierarchy over the alive set: V_0 = alive, V_i an MIS of
/// V_{i-1} w.r.t. r_i = 2^i, ending in a single collector at the top level.
class Spanner {
 public:
  // levels()[i] = V_i as a sorted id list; levels().front() is the alive set
  const std::vector<std::vector<NodeId>>& levels() const { return levels_; }
  int top_level() const { return static_cast<int>(levels_.size()) - 1; }
  NodeId collector() const { return collector_; }
  std::uint64_t construction_slots() const { return construction_slots_; }

  bool contains(NodeId v, int level) const;
  // highest i with v in V_i, or -1 if v is not in the spanner
  int member_level(NodeId v) const;

  struct Parentage {
    NodeId parent{kNoNode};
    int level{0};  // level at which parentage was assigned
  };
  // null for the collector or nodes outside the spanner
  const Parentage* parentage(NodeId v) const;

  // {w in V_{level-1} \ V_level : parent[w] == (v, level)}; throws if v is
  // not in V_level
  std::vector<NodeId> children(NodeId v, int level) const;

  // one line per node: "id member_level parent_id", collector flagged
  void dump(std::ostream& os) const;

  friend Spanner build_spanner(const NodePlacement&, const std::vector<NodeId>&,
                               const SpannerConfig&, const SinrParams&,
                               std::uint64_t, NodeId);

 private:
  std::vector<std::vector<NodeId>> levels_;
  std::vector<std::vector<char>> member_;  // member_[i][v] for O(1) lookups
  std::map<NodeId, Parentage> parent_;
  std::map<std::pair<int, NodeId>, std::vector<NodeId>> children_;
  NodeId collector_{kNoNode};
  std::uint64_t construction_slots_{0};
  std::size_t placement_n_{0};
};

// With a forced root, that node is processed first at every level, so it
// stays a member throughout and ends up as the collector.
Spanner build_spanner(const NodePlacement& placement,
                      const std::vector<NodeId>& alive, const SpannerConfig& cfg,
                      const SinrParams& sinr, std::uint64_t seed,
                      NodeId forced_root = kNoNode);

// Max over levels i >= 1 and members v of V_i of |V_{i-1} ∩ N_{r_i}(v)|.
int density_check(const Spanner& spanner, const NodePlacement& placement);

}  // namespace spanchain
