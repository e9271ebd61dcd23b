#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <limits>
#include <sstream>

#include "spanchain/deployment.hpp"

using namespace spanchain;

namespace {

// brute-force oracle over all pairs
std::pair<double, double> min_max_pairwise(const NodePlacement& p) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (NodeId u = 0; u < p.size(); ++u) {
    for (NodeId v = u + 1; v < p.size(); ++v) {
      const double d = p.distance(u, v);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  return {lo, hi};
}

DeploymentSpec uniform_spec(std::size_t n, double extent, std::uint64_t seed) {
  DeploymentSpec s;
  s.n = n;
  s.plane_w = extent;
  s.plane_h = extent;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("single node placement") {
  NodePlacement p = NodePlacement::generate(uniform_spec(1, 10, 3));
  CHECK(p.size() == 1);
  CHECK(p.gamma() == 1.0);
}

TEST_CASE("uniform placement honors min spacing and gamma") {
  DeploymentSpec spec = uniform_spec(2000, 150, 7);
  NodePlacement p = NodePlacement::generate(spec);
  REQUIRE(p.size() == 2000);

  auto [lo, hi] = min_max_pairwise(p);
  CHECK(lo >= 1.0);  // exact, no tolerance
  CHECK(std::abs(lo - 1.0) <= 1e-9);
  CHECK(p.gamma() <= 150.0 * std::sqrt(2.0));
  CHECK(std::abs(p.gamma() - hi) / hi <= 1e-9);
}

TEST_CASE("a 5000-node deployment on the reference plane is feasible") {
  NodePlacement p = NodePlacement::generate(uniform_spec(5000, 150, 11));
  CHECK(p.size() == 5000);
}

TEST_CASE("infeasible density fails after the resample budget") {
  DeploymentSpec spec = uniform_spec(200, 5, 1);
  spec.resample_budget = 50;
  CHECK_THROWS_AS(NodePlacement::generate(spec), std::runtime_error);
}

TEST_CASE("same spec and seed give a bit-identical placement") {
  DeploymentSpec spec = uniform_spec(300, 80, 42);
  NodePlacement a = NodePlacement::generate(spec);
  NodePlacement b = NodePlacement::generate(spec);
  REQUIRE(a.size() == b.size());
  CHECK(a.gamma() == b.gamma());
  for (NodeId v = 0; v < a.size(); ++v) {
    CHECK(a.position(v).x == b.position(v).x);
    CHECK(a.position(v).y == b.position(v).y);
  }
}

TEST_CASE("normal and exponential placements stay on the plane") {
  for (Distribution d : {Distribution::kNormal, Distribution::kExponential}) {
    DeploymentSpec spec = uniform_spec(200, 100, 5);
    spec.distribution = d;
    NodePlacement p = NodePlacement::generate(spec);
    REQUIRE(p.size() == 200);
    auto [lo, hi] = min_max_pairwise(p);
    CHECK(lo >= 1.0);
    for (const Vec2& pt : p.positions()) {
      CHECK(pt.x >= 0.0);
      CHECK(pt.y >= 0.0);
      CHECK(pt.x <= p.plane_w() + 1e-9);
      CHECK(pt.y <= p.plane_h() + 1e-9);
    }
  }
}

TEST_CASE("distance identities") {
  // min pairwise distance is already 1, so normalization is (almost) identity
  NodePlacement p = NodePlacement::from_points({{0, 0}, {3, 4}, {1, 0}}, 20, 20);
  CHECK(p.distance(0, 0) == 0.0);
  CHECK(p.distance(0, 1) == doctest::Approx(5.0));
  CHECK(p.distance(0, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(p.distance(0, 99), std::out_of_range);
}

TEST_CASE("distance matrix is symmetric") {
  NodePlacement p = NodePlacement::generate(uniform_spec(120, 60, 9));
  for (NodeId u = 0; u < p.size(); ++u) {
    for (NodeId v = 0; v < p.size(); ++v) {
      CHECK(p.distance(u, v) == p.distance(v, u));
    }
  }
}

TEST_CASE("neighbors_within matches a linear-scan oracle") {
  NodePlacement p = NodePlacement::generate(uniform_spec(250, 60, 13));

  CHECK(p.neighbors_within(0, 0.0).empty());  // min spacing is 1
  CHECK(p.neighbors_within(3, p.gamma()).size() == p.size() - 1);
  CHECK_THROWS_AS(p.neighbors_within(0, -1.0), std::invalid_argument);

  const double r = 2.0;
  for (NodeId v = 0; v < p.size(); v += 17) {
    std::vector<NodeId> oracle;
    for (NodeId u = 0; u < p.size(); ++u) {
      if (u != v && p.distance(u, v) <= r) oracle.push_back(u);
    }
    CHECK(p.neighbors_within(v, r) == oracle);
  }
}

TEST_CASE("placement save/load round trip") {
  NodePlacement p = NodePlacement::generate(uniform_spec(80, 50, 21));
  std::stringstream ss;
  p.save(ss);

  NodePlacement q = NodePlacement::load(ss);
  REQUIRE(q.size() == p.size());
  CHECK(std::abs(q.gamma() - p.gamma()) / p.gamma() <= 1e-9);
  for (NodeId v = 0; v < p.size(); ++v) {
    CHECK(q.position(v).x == doctest::Approx(p.position(v).x).epsilon(1e-9));
    CHECK(q.position(v).y == doctest::Approx(p.position(v).y).epsilon(1e-9));
  }

  std::stringstream bad("3 1.0\n0 0 0\n1 5 5\n");
  CHECK_THROWS(NodePlacement::load(bad));
}

TEST_CASE("spec validation") {
  DeploymentSpec s = uniform_spec(0, 10, 1);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = uniform_spec(10, -1, 1);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
