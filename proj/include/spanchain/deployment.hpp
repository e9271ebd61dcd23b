#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spanchain/types.hpp"

namespace spanchain {

enum class Distribution { kUniform, kNormal, kExponential };

Distribution distribution_from_string(const std::string& name);
std::string to_string(Distribution d);

struct DeploymentSpec {
  Distribution distribution{Distribution::kUniform};
  double plane_w{150.0};
  double plane_h{150.0};
  std::size_t n{1};
  std::uint64_t seed{0};
  // normal: centered at the plane midpoint, stddev = extent * normal_sigma_frac
  double normal_sigma_frac{1.0 / 6.0};
  // exponential: offsets from the (0,0) corner with mean = extent * exp_mean_frac
  double exp_mean_frac{0.25};
  // resample attempts per point before generation fails as infeasible
  int resample_budget{1000};

  void validate() const;
};

/// Immutable node geometry: positions on the plane, normalized so the minimum
/// pairwise distance is 1, with gamma = max pairwise distance after
/// normalization (gamma of a 1-node placement is 1 by convention).
class NodePlacement {
 public:
  static NodePlacement generate(const DeploymentSpec& spec);
  // Adopts explicit points (tests, file import); normalizes like generate().
  static NodePlacement from_points(std::vector<Vec2> points, double plane_w,
                                   double plane_h);

  std::size_t size() const { return points_.size(); }
  double gamma() const { return gamma_; }
  double plane_w() const { return plane_w_; }
  double plane_h() const { return plane_h_; }
  const std::vector<Vec2>& positions() const { return points_; }
  const Vec2& position(NodeId v) const;

  double distance(NodeId u, NodeId v) const;
  // ids u != v with d(u, v) <= r, ascending
  std::vector<NodeId> neighbors_within(NodeId v, double r) const;

  // Line format: header "n gamma", then one "id x y" per node, >= 9
  // significant digits.
  void save(std::ostream& os) const;
  static NodePlacement load(std::istream& is);

 private:
  NodePlacement() = default;
  void normalize();
  void check_id(NodeId v) const;

  std::vector<Vec2> points_;
  double gamma_{1.0};
  double plane_w_{0.0};
  double plane_h_{0.0};
};

}  // namespace spanchain
