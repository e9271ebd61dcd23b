#include "spanchain/deployment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace spanchain {

Distribution distribution_from_string(const std::string& name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "normal") return Distribution::kNormal;
  if (name == "exponential") return Distribution::kExponential;
  throw std::invalid_argument("unknown distribution: " + name);
}

std::string to_string(Distribution d) {
  switch (d) {
    case Distribution::kUniform: return "uniform";
    case Distribution::kNormal: return "normal";
    case Distribution::kExponential: return "exponential";
  }
  throw std::logic_error("bad distribution enum");
}

void DeploymentSpec::validate() const {
  if (n < 1) throw std::invalid_argument("deployment: n must be >= 1");
  if (!(plane_w > 0.0) || !(plane_h > 0.0)) {
    throw std::invalid_argument("deployment: plane extents must be positive");
  }
  if (!(normal_sigma_frac > 0.0) || !(exp_mean_frac > 0.0)) {
    throw std::invalid_argument("deployment: distribution fractions must be positive");
  }
  if (resample_budget < 1) {
    throw std::invalid_argument("deployment: resample budget must be >= 1");
  }
}

namespace {

// Uniform grid with unit cells; candidates only need the 3x3 block around
// their own cell to check the min-spacing-1 rule.
class SpacingGrid {
 public:
  explicit SpacingGrid(const std::vector<Vec2>& pts) : pts_(pts) {}

  bool admissible(const Vec2& p) const {
    const long cx = cell(p.x);
    const long cy = cell(p.y);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          const double ddx = p.x - pts_[idx].x;
          const double ddy = p.y - pts_[idx].y;
          if (ddx * ddx + ddy * ddy < 1.0) return false;
        }
      }
    }
    return true;
  }

  void insert(std::size_t idx, const Vec2& p) {
    cells_[key(cell(p.x), cell(p.y))].push_back(idx);
  }

 private:
  static long cell(double c) { return static_cast<long>(std::floor(c)); }
  static std::uint64_t key(long x, long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint32_t>(y);
  }
  const std::vector<Vec2>& pts_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

Vec2 sample_point(const DeploymentSpec& spec, std::mt19937_64& rng) {
  switch (spec.distribution) {
    case Distribution::kUniform: {
      std::uniform_real_distribution<double> ux(0.0, spec.plane_w);
      std::uniform_real_distribution<double> uy(0.0, spec.plane_h);
      return {ux(rng), uy(rng)};
    }
    case Distribution::kNormal: {
      std::normal_distribution<double> nx(spec.plane_w / 2.0,
                                          spec.plane_w * spec.normal_sigma_frac);
      std::normal_distribution<double> ny(spec.plane_h / 2.0,
                                          spec.plane_h * spec.normal_sigma_frac);
      for (int k = 0; k < 100000; ++k) {
        Vec2 p{nx(rng), ny(rng)};
        if (p.x >= 0.0 && p.x <= spec.plane_w && p.y >= 0.0 && p.y <= spec.plane_h) {
          return p;
        }
      }
      throw std::runtime_error("deployment: truncated normal sampling stalled");
    }
    case Distribution::kExponential: {
      std::exponential_distribution<double> ex(1.0 / (spec.plane_w * spec.exp_mean_frac));
      std::exponential_distribution<double> ey(1.0 / (spec.plane_h * spec.exp_mean_frac));
      for (int k = 0; k < 100000; ++k) {
        Vec2 p{ex(rng), ey(rng)};
        if (p.x <= spec.plane_w && p.y <= spec.plane_h) return p;
      }
      throw std::runtime_error("deployment: truncated exponential sampling stalled");
    }
  }
  throw std::logic_error("bad distribution enum");
}

}  // namespace

NodePlacement NodePlacement::generate(const DeploymentSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  NodePlacement out;
  out.plane_w_ = spec.plane_w;
  out.plane_h_ = spec.plane_h;
  out.points_.reserve(spec.n);
  SpacingGrid grid(out.points_);

  for (std::size_t i = 0; i < spec.n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < spec.resample_budget; ++attempt) {
      Vec2 p = sample_point(spec, rng);
      if (grid.admissible(p)) {
        grid.insert(out.points_.size(), p);
        out.points_.push_back(p);
        placed = true;
        break;
      }
    }
    if (!placed) {
      std::ostringstream msg;
      msg << "deployment: could not place node " << i << " of " << spec.n
          << " at min spacing 1 on a " << spec.plane_w << "x" << spec.plane_h
          << " plane after " << spec.resample_budget << " resamples";
      throw std::runtime_error(msg.str());
    }
  }
  out.normalize();
  return out;
}

NodePlacement NodePlacement::from_points(std::vector<Vec2> points, double plane_w,
                                         double plane_h) {
  if (points.empty()) throw std::invalid_argument("placement: no points");
  NodePlacement out;
  out.points_ = std::move(points);
  out.plane_w_ = plane_w;
  out.plane_h_ = plane_h;
  out.normalize();
  return out;
}

void NodePlacement::normalize() {
  const std::size_t n = points_.size();
  if (n < 2) {
    gamma_ = 1.0;
    return;
  }
  // min/max in the same metric distance() uses, so the >= 1 invariant is
  // exact for callers
  auto scan = [&] {
    std::pair<double, double> mm{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d =
            std::hypot(points_[i].x - points_[j].x, points_[i].y - points_[j].y);
        mm.first = std::min(mm.first, d);
        mm.second = std::max(mm.second, d);
      }
    }
    return mm;
  };

  // The nudge escalates because a relative bump of a few epsilon can drown
  // in coordinate rounding when the minimal pair's separation is tiny
  // compared to the coordinate magnitudes.
  double nudge = 4.0 * std::numeric_limits<double>::epsilon();
  for (int pass = 0; pass < 64; ++pass) {
    const auto [min_d, max_d] = scan();
    if (!(min_d > 0.0)) {
      throw std::runtime_error("placement: coincident points cannot be normalized");
    }
    if (min_d >= 1.0 && (pass > 0 || min_d == 1.0)) {
      gamma_ = std::max(1.0, max_d);
      return;
    }
    const double scale = (1.0 + nudge) / min_d;
    for (Vec2& p : points_) {
      p.x *= scale;
      p.y *= scale;
    }
    plane_w_ *= scale;
    plane_h_ *= scale;
    if (pass > 0) nudge *= 4.0;
  }
  throw std::runtime_error("placement: normalization did not converge");
}

void NodePlacement::check_id(NodeId v) const {
  if (v >= points_.size()) {
    throw std::out_of_range("placement: node id out of range");
  }
}

const Vec2& NodePlacement::position(NodeId v) const {
  check_id(v);
  return points_[v];
}

double NodePlacement::distance(NodeId u, NodeId v) const {
  check_id(u);
  check_id(v);
  if (u == v) return 0.0;
  return std::hypot(points_[u].x - points_[v].x, points_[u].y - points_[v].y);
}

std::vector<NodeId> NodePlacement::neighbors_within(NodeId v, double r) const {
  check_id(v);
  if (r < 0.0) throw std::invalid_argument("neighbors_within: radius must be >= 0");
  std::vector<NodeId> out;
  for (NodeId u = 0; u < points_.size(); ++u) {
    if (u == v) continue;
    if (distance(u, v) <= r) out.push_back(u);
  }
  return out;
}

void NodePlacement::save(std::ostream& os) const {
  os << points_.size() << ' ' << std::setprecision(12) << gamma_ << '\n';
  for (std::size_t i = 0; i < points_.size(); ++i) {
    os << i << ' ' << std::setprecision(12) << points_[i].x << ' '
       << std::setprecision(12) << points_[i].y << '\n';
  }
}

NodePlacement NodePlacement::load(std::istream& is) {
  std::size_t n = 0;
  double header_gamma = 0.0;
  if (!(is >> n >> header_gamma)) {
    throw std::runtime_error("placement load: bad header");
  }
  std::vector<Vec2> pts(n);
  std::vector<bool> seen(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t id = 0;
    double x = 0.0, y = 0.0;
    if (!(is >> id >> x >> y)) {
      throw std::runtime_error("placement load: truncated point list");
    }
    if (id >= n || seen[id]) {
      throw std::runtime_error("placement load: bad or duplicate node id");
    }
    seen[id] = true;
    pts[id] = {x, y};
  }
  double w = 0.0, h = 0.0;
  for (const Vec2& p : pts) {
    w = std::max(w, p.x);
    h = std::max(h, p.y);
  }
  NodePlacement out = from_points(std::move(pts), w, h);
  const double rel = std::abs(out.gamma() - header_gamma) /
                     std::max(1.0, std::abs(header_gamma));
  if (rel > 1e-9) {
    throw std::runtime_error("placement load: header gamma disagrees with points");
  }
  return out;
}

}  // namespace spanchain
