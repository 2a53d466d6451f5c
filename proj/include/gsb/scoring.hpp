#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gsb/geometry.hpp"
#include "gsb/geomodel.hpp"

namespace gsb {

struct ScoringConfig {
  double cost_per_meter = 0.086;  // charged per meter of arc length
  double sweet_spot_top = 0.5;    // below the sand roof
  double sweet_spot_bottom = 1.5;
  double sweet_multiplier = 2.0;  // rate inside the sweet spot is multiplier * h

  void validate() const;
};

struct Trajectory {
  std::vector<Point> points;
  bool stopped_early = false;
};

// Boundary depths of one realization sampled at the 1 m midpoints of [x0, x1].
// The kernel used by every score evaluation in the system, so that dynamic
// programming, trajectory scoring and ensemble evaluation agree bit for bit.
class SegmentProfile {
 public:
  SegmentProfile(const Realization& real, double x0, double x1);

  double score(double y0, double y1, const ScoringConfig& cfg) const;
  // True when any quadrature point of the straight segment lies inside a sand.
  bool touches_sand(double y0, double y1) const;

  double x0() const { return x0_; }
  double x1() const { return x1_; }
  int samples() const { return static_cast<int>(top_roof_.size()); }

 private:
  double x0_ = 0.0;
  double x1_ = 0.0;
  double width_ = 0.0;
  std::vector<double> top_roof_, top_floor_, bottom_roof_, bottom_floor_;
};

// Quadrature points per segment: one per started meter of lateral length.
int quadrature_samples(double lateral_length);

double score_segment(Point from, Point to, const Realization& real, const ScoringConfig& cfg);
// Sum of segment scores; a single-point trajectory (stopped at the start) scores 0.
double score_trajectory(const Trajectory& traj, const Realization& real, const ScoringConfig& cfg);
bool reaches_sand(const Trajectory& traj, const Realization& real);

struct ScoreEntry {
  double score = 0.0;
  std::size_t realization = 0;
};

inline constexpr int kDecileCount = 9;  // P10 .. P90

struct ScoreDistribution {
  std::vector<ScoreEntry> entries;  // entry i scores member i
  std::array<double, kDecileCount> percentiles{};
};

// Linear interpolation on sorted data at 1-based rank q (n - 1) + 1.
double percentile_of_sorted(std::span<const double> sorted, double q);
std::array<double, kDecileCount> decile_summary(std::vector<double> values);

ScoreDistribution evaluate_on_ensemble(const Trajectory& traj, const Ensemble& ens, const ScoringConfig& cfg);

// Members whose score falls in decile band `band` (0 = P0..P10, 9 = P90..P100), closed-open
// except the top band. A zero-width band claims all scores equal to its value before any
// higher band does, so the bands always partition the members.
std::vector<std::size_t> select_percentile_band(const ScoreDistribution& dist, int band);

}  // namespace gsb
