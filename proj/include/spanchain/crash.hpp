#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "spanchain/types.hpp"

namespace spanchain {

struct CrashEvent {
  std::uint64_t slot{0};
  NodeId node{kNoNode};
};

class AliveSet;

/// Source of crash events. advance() is called as the clock crosses a slot
/// range; implementations fire events in order and apply them to the alive
/// set themselves (the per-slot crash rate may depend on it).
class CrashModel {
 public:
  virtual ~CrashModel() = default;
  virtual void advance(std::uint64_t from_exclusive, std::uint64_t to_inclusive,
                       AliveSet& alive) = 0;
  virtual void on_epoch_boundary() {}
};

/// Explicit (slot, node) list. Load-time validation: distinct victims must
/// not exceed f = floor(n/2), which keeps any run under the fault cap
/// regardless of where epoch boundaries fall.
class ScriptedCrashes final : public CrashModel {
 public:
  ScriptedCrashes(std::vector<CrashEvent> events, std::size_t n);
  void advance(std::uint64_t from_exclusive, std::uint64_t to_inclusive,
               AliveSet& alive) override;

 private:
  std::vector<CrashEvent> events_;  // sorted by slot
  std::size_t next_{0};
};

/// Poisson crash process at rate_fraction * n nodes per second (constant
/// rate; victims drawn uniformly among alive nodes). Events are dropped while
/// f nodes are already down.
class RateCrashes final : public CrashModel {
 public:
  RateCrashes(double rate_fraction_per_second, std::size_t n, std::uint64_t seed,
              double slot_seconds = kSlotSeconds);
  void advance(std::uint64_t from_exclusive, std::uint64_t to_inclusive,
               AliveSet& alive) override;

 private:
  double per_slot_rate_;
  std::mt19937_64 rng_;
  double budget_;  // remaining exponential mass until the next arrival
  void redraw();
  NodeId pick_victim(const AliveSet& alive);
};

/// Up/down state of the n nodes plus the simultaneous-fault cap.
class AliveSet {
 public:
  explicit AliveSet(std::size_t n);

  std::size_t n() const { return up_.size(); }
  std::size_t f() const { return up_.size() / 2; }
  std::size_t up_count() const { return up_count_; }
  std::size_t down_count() const { return up_.size() - up_count_; }
  bool is_up(NodeId v) const { return up_[v] != 0; }

  // false when the fault cap (f nodes down) blocks the crash
  bool crash(NodeId v);
  void rejoin_all();

  const std::vector<NodeId>& up_sorted() const;
  NodeId up_at(std::size_t index) const;  // index into the up list

 private:
  std::vector<char> up_;
  std::size_t up_count_{0};
  mutable std::vector<NodeId> cache_;
  mutable bool cache_valid_{false};
};

/// Global slot cursor for one trial. Crash events apply at the start of their
/// slot, before any transmission scheduled in it.
class SlotClock {
 public:
  SlotClock(std::size_t n, CrashModel* crashes);

  std::uint64_t now() const { return now_; }
  AliveSet& alive() { return alive_; }
  const AliveSet& alive() const { return alive_; }

  // advance the cursor to slot t (inclusive), firing crash events in (now, t]
  void advance_to(std::uint64_t t);
  // consume k slots; returns the new cursor
  std::uint64_t consume(std::uint64_t k);
  // shorthand for consume(1)
  std::uint64_t step();

  void epoch_boundary_rejoin();

 private:
  std::uint64_t now_{0};
  AliveSet alive_;
  CrashModel* crashes_;
};

}  // namespace spanchain
