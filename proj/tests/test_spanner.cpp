#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "spanchain/spanner.hpp"

using namespace spanchain;

namespace {

DeploymentSpec uniform_spec(std::size_t n, double extent, std::uint64_t seed) {
  DeploymentSpec s;
  s.n = n;
  s.plane_w = extent;
  s.plane_h = extent;
  s.seed = seed;
  return s;
}

std::vector<NodeId> all_ids(const NodePlacement& p) {
  std::vector<NodeId> ids(p.size());
  for (NodeId v = 0; v < p.size(); ++v) ids[v] = v;
  return ids;
}

// exhaustive pairwise-distance checker for the three structural properties
void check_structure(const Spanner& s, const NodePlacement& p,
                     const std::vector<NodeId>& alive) {
  REQUIRE(s.levels().front() == alive);
  REQUIRE(s.levels().back().size() == 1);
  REQUIRE(s.levels().back().front() == s.collector());

  for (int i = 1; i <= s.top_level(); ++i) {
    const double r = std::exp2(i);
    const auto& cur = s.levels()[i];
    const auto& prev = s.levels()[i - 1];

    // nesting
    for (NodeId v : cur) {
      REQUIRE(std::binary_search(prev.begin(), prev.end(), v));
    }
    // independence: d > r_i inside V_i
    for (std::size_t a = 0; a < cur.size(); ++a) {
      for (std::size_t b = a + 1; b < cur.size(); ++b) {
        REQUIRE(p.distance(cur[a], cur[b]) > r);
      }
    }
    // maximality + parentage: dropped nodes have a parent within r_i at level i
    for (NodeId w : prev) {
      if (std::binary_search(cur.begin(), cur.end(), w)) continue;
      const auto* par = s.parentage(w);
      REQUIRE(par != nullptr);
      REQUIRE(par->level == i);
      REQUIRE(std::binary_search(cur.begin(), cur.end(), par->parent));
      REQUIRE(p.distance(w, par->parent) <= r);
    }
  }
}

}  // namespace

TEST_CASE("single alive node collapses to the collector") {
  NodePlacement p = NodePlacement::generate(uniform_spec(10, 20, 1));
  Spanner s = build_spanner(p, {4}, SpannerConfig{}, SinrParams{}, 1);
  CHECK(s.top_level() == 0);
  CHECK(s.collector() == 4);
  CHECK(s.construction_slots() == 0);
}

TEST_CASE("two nodes at distance 1 form collector plus child") {
  NodePlacement p = NodePlacement::from_points({{0, 0}, {1, 0}}, 2, 2);
  Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, 5);
  REQUIRE(s.top_level() == 1);  // gamma = 1 still needs a level to collapse
  const NodeId collector = s.collector();
  const NodeId other = collector == 0 ? 1 : 0;
  CHECK(s.children(collector, 1) == std::vector<NodeId>{other});
  const auto* par = s.parentage(other);
  REQUIRE(par != nullptr);
  CHECK(par->parent == collector);
  CHECK(par->level == 1);
}

TEST_CASE("4x4 unit grid spanner passes the exhaustive checker") {
  std::vector<Vec2> pts;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) pts.push_back({double(x), double(y)});
  }
  NodePlacement p = NodePlacement::from_points(pts, 3, 3);
  CHECK(p.gamma() == doctest::Approx(3.0 * std::sqrt(2.0)));
  Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, 17);
  CHECK(s.top_level() == 3);
  check_structure(s, p, all_ids(p));

  // density_check against a direct scan
  int oracle = 0;
  for (int i = 1; i <= s.top_level(); ++i) {
    for (NodeId v : s.levels()[i]) {
      int count = 0;
      for (NodeId w : s.levels()[i - 1]) {
        if (w != v && p.distance(v, w) <= std::exp2(i)) ++count;
      }
      oracle = std::max(oracle, count);
    }
  }
  CHECK(density_check(s, p) == oracle);
  CHECK(density_check(s, p) <= 25);
}

TEST_CASE("children errors for non-members and partitions a level") {
  NodePlacement p = NodePlacement::generate(uniform_spec(60, 40, 23));
  Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, 23);

  const int top = s.top_level();
  std::vector<NodeId> level_below = s.levels()[top - 1];
  std::vector<NodeId> covered;
  for (NodeId v : s.levels()[top]) {
    for (NodeId c : s.children(v, top)) covered.push_back(c);
  }
  std::sort(covered.begin(), covered.end());
  std::vector<NodeId> expected;
  for (NodeId w : level_below) {
    if (w != s.collector()) expected.push_back(w);
  }
  CHECK(covered == expected);

  // a node outside V_top is rejected
  for (NodeId w : level_below) {
    if (!s.contains(w, top)) {
      CHECK_THROWS_AS(s.children(w, top), std::invalid_argument);
      break;
    }
  }
}

TEST_CASE("random placements satisfy all invariants and the density bound") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    NodePlacement p = NodePlacement::generate(uniform_spec(150, 70, 500 + seed));
    Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, seed);
    check_structure(s, p, all_ids(p));
    CHECK(density_check(s, p) <= 25);
  }
}

TEST_CASE("ring cardinality stays within 24j on small instances") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    NodePlacement p = NodePlacement::generate(uniform_spec(120, 40, 900 + seed));
    Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, seed);
    for (int i = 1; i <= s.top_level(); ++i) {
      const double r = std::exp2(i);
      for (NodeId v : s.levels()[i]) {
        for (int j = 1; j * r <= p.gamma() + r; ++j) {
          int count = 0;
          for (NodeId w : s.levels()[i - 1]) {
            if (w == v) continue;
            const double d = p.distance(v, w);
            if (d >= j * r && d <= (j + 1) * r) ++count;
          }
          CHECK(count <= 24 * j);
        }
      }
    }
  }
}

TEST_CASE("rebuild over a shrunken alive set spans exactly the survivors") {
  NodePlacement p = NodePlacement::generate(uniform_spec(90, 50, 31));
  std::vector<NodeId> alive;
  for (NodeId v = 0; v < p.size(); ++v) {
    if (v % 3 != 0) alive.push_back(v);
  }
  Spanner s = build_spanner(p, alive, SpannerConfig{}, SinrParams{}, 31);
  check_structure(s, p, alive);
  for (NodeId v = 0; v < p.size(); ++v) {
    CHECK((s.member_level(v) >= 0) == (v % 3 != 0));
  }
}

TEST_CASE("oracle construction is deterministic and charges the slot formula") {
  NodePlacement p = NodePlacement::generate(uniform_spec(100, 60, 8));
  SpannerConfig cfg;
  Spanner a = build_spanner(p, all_ids(p), cfg, SinrParams{}, 77);
  Spanner b = build_spanner(p, all_ids(p), cfg, SinrParams{}, 77);
  CHECK(a.levels() == b.levels());
  CHECK(a.collector() == b.collector());

  const std::uint64_t expected = static_cast<std::uint64_t>(cfg.c_span) *
                                 ceil_log2(p.size()) *
                                 static_cast<std::uint64_t>(a.top_level());
  CHECK(a.construction_slots() == expected);

  Spanner c = build_spanner(p, all_ids(p), cfg, SinrParams{}, 78);
  CHECK(c.levels().back().size() == 1);  // different seed, still one root
}

TEST_CASE("distributed construction keeps the invariants and measures slots") {
  NodePlacement p = NodePlacement::generate(uniform_spec(40, 25, 12));
  SpannerConfig cfg;
  cfg.mode = SpannerMode::kDistributed;
  cfg.contend_p = 0.05;
  Spanner s = build_spanner(p, all_ids(p), cfg, SinrParams{}, 3);
  check_structure(s, p, all_ids(p));
  CHECK(s.construction_slots() > 0);
}

TEST_CASE("spanner dump lists every node and flags the collector") {
  NodePlacement p = NodePlacement::generate(uniform_spec(20, 18, 6));
  Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, 6);
  std::ostringstream os;
  s.dump(os);
  std::istringstream is(os.str());
  std::string line;
  std::size_t rows = 0, collectors = 0;
  while (std::getline(is, line)) {
    ++rows;
    if (line.find("collector") != std::string::npos) ++collectors;
  }
  CHECK(rows == p.size());
  CHECK(collectors == 1);
}

TEST_CASE("a forced root survives every level and collects") {
  NodePlacement p = NodePlacement::generate(uniform_spec(60, 40, 14));
  for (NodeId root : {0u, 7u, 59u}) {
    Spanner s = build_spanner(p, all_ids(p), SpannerConfig{}, SinrParams{}, 14, root);
    CHECK(s.collector() == root);
    check_structure(s, p, all_ids(p));
  }
  CHECK_THROWS_AS(build_spanner(p, {1, 2, 3}, SpannerConfig{}, SinrParams{}, 1, 9),
                  std::invalid_argument);
}

TEST_CASE("empty alive set is rejected") {
  NodePlacement p = NodePlacement::generate(uniform_spec(5, 10, 2));
  CHECK_THROWS_AS(build_spanner(p, {}, SpannerConfig{}, SinrParams{}, 0),
                  std::invalid_argument);
}
