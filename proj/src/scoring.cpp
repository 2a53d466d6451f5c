#include "gsb/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsb/errors.hpp"

namespace gsb {

void ScoringConfig::validate() const {
  if (!(cost_per_meter >= 0.0)) throw ConfigError("cost_per_meter must be non-negative");
  if (!(sweet_spot_top >= 0.0 && sweet_spot_top < sweet_spot_bottom))
    throw ConfigError("sweet spot must satisfy 0 <= top < bottom");
}

int quadrature_samples(double lateral_length) {
  return std::max(1, static_cast<int>(std::ceil(lateral_length - 1e-9)));
}

SegmentProfile::SegmentProfile(const Realization& real, double x0, double x1) : x0_(x0), x1_(x1) {
  if (!(x1 > x0)) throw DomainError("segment must advance laterally (x1 > x0)");
  if (!real.grid.contains(x0) || !real.grid.contains(x1))
    throw DomainError("segment [" + std::to_string(x0) + ", " + std::to_string(x1) + "] outside lateral grid");
  const int n = quadrature_samples(x1 - x0);
  width_ = (x1 - x0) / n;
  top_roof_.resize(static_cast<std::size_t>(n));
  top_floor_.resize(static_cast<std::size_t>(n));
  bottom_roof_.resize(static_cast<std::size_t>(n));
  bottom_floor_.resize(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    const double x = x0 + (m + 0.5) * width_;
    const auto b = real.boundaries_at(x);
    const auto i = static_cast<std::size_t>(m);
    top_roof_[i] = b[0];
    top_floor_[i] = b[1];
    bottom_roof_[i] = b[2];
    bottom_floor_[i] = b[3];
  }
}

double SegmentProfile::score(double y0, double y1, const ScoringConfig& cfg) const {
  const std::size_t n = top_roof_.size();
  const double dy = y1 - y0;
  const double inv_n = 1.0 / static_cast<double>(n);
  double reward = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double y = y0 + dy * ((static_cast<double>(m) + 0.5) * inv_n);
    double roof = 0.0;
    double h = 0.0;
    if (y >= top_roof_[m] && y < top_floor_[m]) {
      roof = top_roof_[m];
      h = top_floor_[m] - roof;
    } else if (y >= bottom_roof_[m] && y < bottom_floor_[m]) {
      roof = bottom_roof_[m];
      h = bottom_floor_[m] - roof;
    } else {
      continue;
    }
    const double below = y - roof;
    const bool sweet = below >= cfg.sweet_spot_top && below <= cfg.sweet_spot_bottom;
    reward += sweet ? cfg.sweet_multiplier * h : h;
  }
  return reward * width_ - cfg.cost_per_meter * std::hypot(x1_ - x0_, dy);
}

bool SegmentProfile::touches_sand(double y0, double y1) const {
  const std::size_t n = top_roof_.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double y = y0 + (y1 - y0) * ((static_cast<double>(m) + 0.5) * inv_n);
    if ((y >= top_roof_[m] && y < top_floor_[m]) || (y >= bottom_roof_[m] && y < bottom_floor_[m])) return true;
  }
  return false;
}

double score_segment(Point from, Point to, const Realization& real, const ScoringConfig& cfg) {
  return SegmentProfile(real, from.x, to.x).score(from.y, to.y, cfg);
}

double score_trajectory(const Trajectory& traj, const Realization& real, const ScoringConfig& cfg) {
  if (traj.points.empty()) throw ValidationError("trajectory has no points");
  double total = 0.0;
  for (std::size_t i = 1; i < traj.points.size(); ++i)
    total += score_segment(traj.points[i - 1], traj.points[i], real, cfg);
  return total;
}

bool reaches_sand(const Trajectory& traj, const Realization& real) {
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    const auto& a = traj.points[i - 1];
    const auto& b = traj.points[i];
    if (SegmentProfile(real, a.x, b.x).touches_sand(a.y, b.y)) return true;
  }
  return false;
}

double percentile_of_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("percentile of empty sample");
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::array<double, kDecileCount> decile_summary(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::array<double, kDecileCount> out{};
  for (int d = 0; d < kDecileCount; ++d)
    out[static_cast<std::size_t>(d)] = percentile_of_sorted(values, (d + 1) / 10.0);
  return out;
}

ScoreDistribution evaluate_on_ensemble(const Trajectory& traj, const Ensemble& ens, const ScoringConfig& cfg) {
  ScoreDistribution dist;
  dist.entries.reserve(ens.size());
  std::vector<double> values;
  values.reserve(ens.size());
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const double s = score_trajectory(traj, ens.members[j], cfg);
    dist.entries.push_back({s, j});
    values.push_back(s);
  }
  dist.percentiles = decile_summary(std::move(values));
  return dist;
}

std::vector<std::size_t> select_percentile_band(const ScoreDistribution& dist, int band) {
  if (band < 0 || band > kDecileCount) throw ValidationError("band index must be in 0..9");
  if (dist.entries.empty()) return {};
  std::vector<double> sorted;
  sorted.reserve(dist.entries.size());
  for (const auto& e : dist.entries) sorted.push_back(e.score);
  std::sort(sorted.begin(), sorted.end());
  std::array<double, kDecileCount + 2> edges{};
  edges.front() = sorted.front();
  edges.back() = sorted.back();
  for (int d = 0; d < kDecileCount; ++d) edges[static_cast<std::size_t>(d + 1)] = dist.percentiles[static_cast<std::size_t>(d)];

  auto band_of = [&](double s) {
    for (int b = 0; b < kDecileCount; ++b) {
      const double lo = edges[static_cast<std::size_t>(b)];
      const double hi = edges[static_cast<std::size_t>(b + 1)];
      if (s < hi || (s == lo && lo == hi)) return b;
    }
    return kDecileCount;
  };
  std::vector<std::size_t> out;
  for (const auto& e : dist.entries)
    if (band_of(e.score) == band) out.push_back(e.realization);
  return out;
}

}  // namespace gsb
