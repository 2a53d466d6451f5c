#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsb/geometry.hpp"
#include "gsb/geomodel.hpp"

namespace gsb {

// Look-around tool at the bit. The observation proxy is the signed vertical distance
// from the tool to each boundary, saturated at the sensitivity limit.
struct ToolConfig {
  double look_around = 4.8;
  double noise_std = 0.1;
  int sub_locations_per_stand = 3;
  std::uint64_t seed = 4242;

  void validate() const;
};

struct Observation {
  double x = 0.0;
  double y = 0.0;
  std::array<double, kBoundaryCount> distances{};  // b_k(x) - y, in [-look_around, +look_around]
};

// Noise (when requested) is added before saturation. Noisy draws depend only on
// (cfg.seed, call_index), so repeated calls with the same index agree.
Observation observe(const Realization& real, double x, double y, const ToolConfig& cfg, bool noisy,
                    std::uint64_t call_index = 0);

// Observations at the sub-locations x0 + i (x1 - x0) / s, i = 1..s, depths interpolated along
// the segment. Noisy call indices are stand_index * s + i.
std::vector<Observation> stand_observations(const Realization& real, Point from, Point to, const ToolConfig& cfg,
                                            bool noisy, std::uint64_t stand_index = 0);

}  // namespace gsb
