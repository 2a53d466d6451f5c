#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace gsb {

// Section coordinates in meters: x lateral, y vertical depth (increasing downward).
struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

// Dip in degrees from horizontal; positive means drilling downward.
inline double dip_degrees(double dy, double dx) {
  return std::atan2(dy, dx) * 180.0 / std::numbers::pi;
}

// Slack on the dog-leg comparison so lattice moves sitting exactly on the
// cone edge are admitted regardless of rounding in atan.
inline constexpr double kDoglegSlackDeg = 1e-9;

inline bool within_dogleg(double dy, double dx, double incoming_dip_deg, double limit_deg) {
  return std::abs(dip_degrees(dy, dx) - incoming_dip_deg) <= limit_deg + kDoglegSlackDeg;
}

// Regular grid of admissible well depths. Node n sits at origin + (first + n) * spacing,
// so the origin (the episode start depth) is always a node.
class YLattice {
 public:
  YLattice() = default;
  YLattice(double origin, double spacing, int first, int count)
      : origin_(origin), spacing_(spacing), first_(first), count_(count) {}

  // Smallest lattice anchored at `origin` that covers [lo, hi] and the origin itself.
  static YLattice covering(double origin, double spacing, double lo, double hi) {
    const int first = std::min(0, static_cast<int>(std::floor((lo - origin) / spacing + 1e-9)));
    const int last = std::max(0, static_cast<int>(std::ceil((hi - origin) / spacing - 1e-9)));
    return YLattice(origin, spacing, first, last - first + 1);
  }

  int count() const { return count_; }
  double spacing() const { return spacing_; }
  double origin() const { return origin_; }
  int first() const { return first_; }
  double y(int node) const { return origin_ + static_cast<double>(first_ + node) * spacing_; }
  double y_min() const { return y(0); }
  double y_max() const { return y(count_ - 1); }
  double span() const { return y_max() - y_min(); }

  // Node index whose depth equals `depth` within `tol`, if any.
  std::optional<int> index_of(double depth, double tol = 1e-6) const {
    const double steps = (depth - origin_) / spacing_ - first_;
    const long node = std::lround(steps);
    if (node < 0 || node >= count_) return std::nullopt;
    if (std::abs(y(static_cast<int>(node)) - depth) > tol) return std::nullopt;
    return static_cast<int>(node);
  }

 private:
  double origin_ = 0.0;
  double spacing_ = 1.0;
  int first_ = 0;
  int count_ = 1;
};

// Contiguous range [lo, hi] of lattice nodes reachable from `node` over one stand of
// lateral length `dx` without exceeding the dog-leg limit. Empty when lo > hi.
inline std::pair<int, int> legal_target_range(const YLattice& lattice, int node, double incoming_dip_deg,
                                              double dx, double limit_deg) {
  const double s = lattice.spacing();
  const double y0 = lattice.y(node);
  auto legal = [&](int j) {
    return j >= 0 && j < lattice.count() && within_dogleg(lattice.y(j) - y0, dx, incoming_dip_deg, limit_deg);
  };
  const double to_rad = std::numbers::pi / 180.0;
  const double lo_angle = std::max(-89.0, incoming_dip_deg - limit_deg) * to_rad;
  const double hi_angle = std::min(89.0, incoming_dip_deg + limit_deg) * to_rad;
  int lo = node + static_cast<int>(std::ceil(dx * std::tan(lo_angle) / s - 1e-6));
  int hi = node + static_cast<int>(std::floor(dx * std::tan(hi_angle) / s + 1e-6));
  lo = std::max(lo, 0);
  hi = std::min(hi, lattice.count() - 1);
  while (lo <= hi && !legal(lo)) ++lo;
  while (legal(lo - 1)) --lo;
  while (hi >= lo && !legal(hi)) --hi;
  while (legal(hi + 1)) ++hi;
  return {lo, hi};
}

struct Decision {
  enum class Kind { continue_drilling, stop };
  Kind kind = Kind::stop;
  double y = 0.0;  // target depth at the next decision abscissa; unused for stop

  static Decision stop() { return {Kind::stop, 0.0}; }
  static Decision go(double y) { return {Kind::continue_drilling, y}; }
  bool is_stop() const { return kind == Kind::stop; }
  friend bool operator==(const Decision&, const Decision&) = default;
};

}  // namespace gsb
