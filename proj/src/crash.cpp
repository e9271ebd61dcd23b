#include "spanchain/crash.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spanchain {

AliveSet::AliveSet(std::size_t n) : up_(n, 1), up_count_(n) {
  if (n == 0) throw std::invalid_argument("alive set: n must be >= 1");
}

bool AliveSet::crash(NodeId v) {
  if (v >= up_.size()) throw std::out_of_range("alive set: bad node id");
  if (!up_[v]) return false;
  if (down_count() >= f()) return false;
  up_[v] = 0;
  --up_count_;
  cache_valid_ = false;
  return true;
}

void AliveSet::rejoin_all() {
  std::fill(up_.begin(), up_.end(), 1);
  up_count_ = up_.size();
  cache_valid_ = false;
}

const std::vector<NodeId>& AliveSet::up_sorted() const {
  if (!cache_valid_) {
    cache_.clear();
    cache_.reserve(up_count_);
    for (NodeId v = 0; v < up_.size(); ++v) {
      if (up_[v]) cache_.push_back(v);
    }
    cache_valid_ = true;
  }
  return cache_;
}

NodeId AliveSet::up_at(std::size_t index) const {
  const auto& ups = up_sorted();
  if (index >= ups.size()) throw std::out_of_range("alive set: bad up index");
  return ups[index];
}

ScriptedCrashes::ScriptedCrashes(std::vector<CrashEvent> events, std::size_t n)
    : events_(std::move(events)) {
  std::stable_sort(events_.begin(), events_.end(),
                   [](const CrashEvent& a, const CrashEvent& b) { return a.slot < b.slot; });
  std::set<NodeId> victims;
  for (const CrashEvent& e : events_) {
    if (e.node >= n) throw std::invalid_argument("crash schedule: bad node id");
    victims.insert(e.node);
  }
  if (victims.size() > n / 2) {
    throw std::invalid_argument("crash schedule: more than f distinct victims");
  }
}

void ScriptedCrashes::advance(std::uint64_t from_exclusive, std::uint64_t to_inclusive,
                              AliveSet& alive) {
  while (next_ < events_.size() && events_[next_].slot <= to_inclusive) {
    if (events_[next_].slot > from_exclusive) {
      alive.crash(events_[next_].node);
    }
    ++next_;
  }
}

RateCrashes::RateCrashes(double rate_fraction_per_second, std::size_t n,
                         std::uint64_t seed, double slot_seconds)
    : per_slot_rate_(rate_fraction_per_second * static_cast<double>(n) * slot_seconds),
      rng_(seed) {
  if (rate_fraction_per_second < 0.0) {
    throw std::invalid_argument("crash rate must be >= 0");
  }
  redraw();
}

void RateCrashes::redraw() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng_);
  while (x <= 0.0) x = u(rng_);
  budget_ = -std::log(x);
}

NodeId RateCrashes::pick_victim(const AliveSet& alive) {
  std::uniform_int_distribution<std::size_t> pick(0, alive.up_count() - 1);
  return alive.up_at(pick(rng_));
}

void RateCrashes::advance(std::uint64_t from_exclusive, std::uint64_t to_inclusive,
                          AliveSet& alive) {
  if (per_slot_rate_ <= 0.0) return;
  std::uint64_t cursor = from_exclusive;
  while (cursor < to_inclusive) {
    const std::uint64_t gap =
        std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(budget_ / per_slot_rate_)));
    if (cursor + gap > to_inclusive) {
      budget_ -= static_cast<double>(to_inclusive - cursor) * per_slot_rate_;
      return;
    }
    cursor += gap;
    if (alive.up_count() > 0) {
      alive.crash(pick_victim(alive));  // dropped when the f-cap blocks it
    }
    redraw();
  }
}

SlotClock::SlotClock(std::size_t n, CrashModel* crashes)
    : alive_(n), crashes_(crashes) {}

void SlotClock::advance_to(std::uint64_t t) {
  if (t < now_) throw std::logic_error("slot clock cannot move backwards");
  if (t == now_) return;
  if (crashes_ != nullptr) crashes_->advance(now_, t, alive_);
  now_ = t;
}

std::uint64_t SlotClock::consume(std::uint64_t k) {
  advance_to(now_ + k);
  return now_;
}

std::uint64_t SlotClock::step() { return consume(1); }

void SlotClock::epoch_boundary_rejoin() {
  alive_.rejoin_all();
  if (crashes_ != nullptr) crashes_->on_epoch_boundary();
}

}  // namespace spanchain
