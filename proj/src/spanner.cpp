#include "spanchain/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

namespace spanchain {

SpannerMode spanner_mode_from_string(const std::string& name) {
  if (name == "oracle") return SpannerMode::kOracle;
  if (name == "distributed") return SpannerMode::kDistributed;
  throw std::invalid_argument("unknown spanner mode: " + name);
}

std::string to_string(SpannerMode m) {
  return m == SpannerMode::kOracle ? "oracle" : "distributed";
}

bool Spanner::contains(NodeId v, int level) const {
  if (level < 0 || level >= static_cast<int>(levels_.size())) return false;
  if (v >= member_[level].size()) return false;
  return member_[level][v] != 0;
}

int Spanner::member_level(NodeId v) const {
  for (int i = top_level(); i >= 0; --i) {
    if (contains(v, i)) return i;
  }
  return -1;
}

const Spanner::Parentage* Spanner::parentage(NodeId v) const {
  auto it = parent_.find(v);
  return it == parent_.end() ? nullptr : &it->second;
}

std::vector<NodeId> Spanner::children(NodeId v, int level) const {
  if (!contains(v, level)) {
    throw std::invalid_argument("children: node is not a member of that level");
  }
  auto it = children_.find({level, v});
  return it == children_.end() ? std::vector<NodeId>{} : it->second;
}

void Spanner::dump(std::ostream& os) const {
  for (NodeId v : levels_.front()) {
    os << v << ' ' << member_level(v) << ' ';
    if (v == collector_) {
      os << "- collector\n";
    } else {
      os << parent_.at(v).parent << '\n';
    }
  }
}

namespace {

struct LevelBuild {
  std::vector<NodeId> members;
  std::map<NodeId, NodeId> parent_of;  // covered node -> parent
};

NodeId nearest_member(const NodePlacement& p, NodeId w,
                      const std::vector<NodeId>& members, double radius) {
  NodeId best = kNoNode;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId m : members) {
    const double d = p.distance(w, m);
    if (d > radius) continue;
    if (d < best_d || (d == best_d && m < best)) {
      best = m;
      best_d = d;
    }
  }
  return best;
}

LevelBuild build_level_oracle(const NodePlacement& p,
                              const std::vector<NodeId>& prev, double radius,
                              std::mt19937_64& rng, NodeId forced_root) {
  std::vector<NodeId> order = prev;
  std::shuffle(order.begin(), order.end(), rng);
  if (forced_root != kNoNode) {
    auto it = std::find(order.begin(), order.end(), forced_root);
    if (it != order.end()) std::rotate(order.begin(), it, it + 1);
  }

  LevelBuild out;
  for (NodeId v : order) {
    bool independent = true;
    for (NodeId m : out.members) {
      if (p.distance(v, m) <= radius) {
        independent = false;
        break;
      }
    }
    if (independent) out.members.push_back(v);
  }
  std::sort(out.members.begin(), out.members.end());

  for (NodeId w : prev) {
    if (std::binary_search(out.members.begin(), out.members.end(), w)) continue;
    const NodeId parent = nearest_member(p, w, out.members, radius);
    if (parent == kNoNode) {
      throw std::logic_error("spanner: maximality violated during build");
    }
    out.parent_of[w] = parent;
  }
  return out;
}

// Slotted contention MIS: undecided nodes beacon with probability contend_p at
// the level power; a beacon wins when no other beacon was sent within the
// level radius and every undecided neighbor inside the radius decoded it.
// Two slots are charged per round (beacon + announcement). A round cap with a
// greedy fallback keeps the level invariants exact on unlucky schedules.
LevelBuild build_level_distributed(const NodePlacement& p,
                                   const std::vector<NodeId>& prev, int level,
                                   const SinrParams& sinr, double contend_p,
                                   std::mt19937_64& rng,
                                   std::uint64_t& slots_used, NodeId forced_root) {
  const double radius = std::exp2(level);
  const double power = transmit_power(sinr, level);

  LevelBuild out;
  std::vector<NodeId> undecided = prev;
  if (forced_root != kNoNode &&
      std::find(prev.begin(), prev.end(), forced_root) != prev.end()) {
    out.members.push_back(forced_root);
    std::vector<NodeId> rest;
    for (NodeId v : undecided) {
      if (v == forced_root) continue;
      if (p.distance(v, forced_root) <= radius) {
        out.parent_of[v] = forced_root;
      } else {
        rest.push_back(v);
      }
    }
    undecided = std::move(rest);
  }
  const std::uint64_t round_cap =
      64ull * static_cast<std::uint64_t>(ceil_log2(std::max<std::size_t>(p.size(), 2))) + 64;

  std::bernoulli_distribution contend(std::clamp(contend_p, 0.0, 1.0));
  for (std::uint64_t round = 0; round < round_cap && !undecided.empty(); ++round) {
    slots_used += 2;
    std::vector<TransmissionIntent> intents;
    for (NodeId v : undecided) {
      if (contend(rng)) intents.push_back({v, power, v});
    }
    if (intents.empty()) continue;

    std::vector<NodeId> listeners;
    for (NodeId v : undecided) listeners.push_back(v);
    SlotOutcome slot = resolve_slot(p, sinr, intents, listeners);

    std::vector<NodeId> winners;
    for (const TransmissionIntent& t : intents) {
      bool clean = true;
      for (const TransmissionIntent& o : intents) {
        if (o.sender != t.sender && p.distance(o.sender, t.sender) <= radius) {
          clean = false;
          break;
        }
      }
      if (!clean) continue;
      for (NodeId v : undecided) {
        if (v == t.sender || p.distance(v, t.sender) > radius) continue;
        const auto it = slot.received.find(v);
        const bool heard =
            it != slot.received.end() &&
            std::any_of(it->second.begin(), it->second.end(),
                        [&](const auto& pr) { return pr.first == t.sender; });
        if (!heard) {
          clean = false;
          break;
        }
      }
      if (clean) winners.push_back(t.sender);
    }
    if (winners.empty()) continue;

    for (NodeId w : winners) out.members.push_back(w);
    std::vector<NodeId> still;
    for (NodeId v : undecided) {
      if (std::find(winners.begin(), winners.end(), v) != winners.end()) continue;
      const NodeId parent = nearest_member(p, v, out.members, radius);
      if (parent == kNoNode) {
        still.push_back(v);
      } else {
        out.parent_of[v] = parent;
      }
    }
    undecided = std::move(still);
  }

  // fallback: finish the level centrally, keeping independence + coverage
  for (NodeId v : undecided) {
    bool independent = true;
    for (NodeId m : out.members) {
      if (p.distance(v, m) <= radius) {
        independent = false;
        break;
      }
    }
    if (independent) out.members.push_back(v);
  }
  std::sort(out.members.begin(), out.members.end());
  for (NodeId v : undecided) {
    if (std::binary_search(out.members.begin(), out.members.end(), v)) continue;
    out.parent_of[v] = nearest_member(p, v, out.members, radius);
  }
  return out;
}

}  // namespace

Spanner build_spanner(const NodePlacement& placement,
                      const std::vector<NodeId>& alive, const SpannerConfig& cfg,
                      const SinrParams& sinr, std::uint64_t seed,
                      NodeId forced_root) {
  if (alive.empty()) throw std::invalid_argument("build_spanner: alive set is empty");
  std::vector<NodeId> base = alive;
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  for (NodeId v : base) {
    if (v >= placement.size()) throw std::out_of_range("build_spanner: bad node id");
  }
  if (forced_root != kNoNode &&
      !std::binary_search(base.begin(), base.end(), forced_root)) {
    throw std::invalid_argument("build_spanner: forced root is not alive");
  }
  if (cfg.mode == SpannerMode::kDistributed &&
      !(cfg.contend_p > 0.0 && cfg.contend_p <= 1.0)) {
    throw std::invalid_argument("build_spanner: distributed mode needs contend_p in (0, 1]");
  }

  Spanner s;
  s.placement_n_ = placement.size();
  const int levels = base.size() == 1 ? 0 : std::max(1, level_count(placement.gamma()));
  s.levels_.push_back(base);

  std::mt19937_64 rng(seed);
  std::uint64_t measured_slots = 0;
  for (int i = 1; i <= levels; ++i) {
    const double radius = std::exp2(i);
    LevelBuild lb =
        cfg.mode == SpannerMode::kOracle
            ? build_level_oracle(placement, s.levels_.back(), radius, rng,
                                 forced_root)
            : build_level_distributed(placement, s.levels_.back(), i, sinr,
                                      cfg.contend_p, rng, measured_slots,
                                      forced_root);
    for (const auto& [w, parent] : lb.parent_of) {
      s.parent_[w] = {parent, i};
      s.children_[{i, parent}].push_back(w);
    }
    s.levels_.push_back(std::move(lb.members));
  }

  if (s.levels_.back().size() != 1) {
    throw std::logic_error("build_spanner: top level did not collapse to one node");
  }
  s.collector_ = s.levels_.back().front();

  s.member_.assign(s.levels_.size(), std::vector<char>(placement.size(), 0));
  for (std::size_t i = 0; i < s.levels_.size(); ++i) {
    for (NodeId v : s.levels_[i]) s.member_[i][v] = 1;
  }

  if (cfg.mode == SpannerMode::kOracle) {
    s.construction_slots_ = static_cast<std::uint64_t>(cfg.c_span) *
                            static_cast<std::uint64_t>(ceil_log2(placement.size())) *
                            static_cast<std::uint64_t>(levels);
  } else {
    s.construction_slots_ = measured_slots;
  }
  return s;
}

int density_check(const Spanner& spanner, const NodePlacement& placement) {
  int worst = 0;
  for (int i = 1; i <= spanner.top_level(); ++i) {
    const double radius = std::exp2(i);
    const auto& prev = spanner.levels()[i - 1];
    for (NodeId v : spanner.levels()[i]) {
      int count = 0;
      for (NodeId w : prev) {
        if (w != v && placement.distance(v, w) <= radius) ++count;
      }
      worst = std::max(worst, count);
    }
  }
  return worst;
}

}  // namespace spanchain
