#include "gsb/measurement.hpp"

#include <algorithm>
#include <random>

#include "gsb/errors.hpp"
#include "gsb/random.hpp"

namespace gsb {

void ToolConfig::validate() const {
  if (!(look_around > 0.0)) throw ConfigError("look_around must be positive");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
  if (sub_locations_per_stand < 1) throw ConfigError("sub_locations_per_stand must be at least 1");
}

Observation observe(const Realization& real, double x, double y, const ToolConfig& cfg, bool noisy,
                    std::uint64_t call_index) {
  const auto b = real.boundaries_at(x);
  Observation obs{x, y, {}};
  if (noisy && cfg.noise_std > 0.0) {
    auto rng = keyed_rng({cfg.seed, stream::tool_noise, call_index});
    std::normal_distribution<double> noise(0.0, cfg.noise_std);
    for (int k = 0; k < kBoundaryCount; ++k) {
      const double d = b[static_cast<std::size_t>(k)] - y + noise(rng);
      obs.distances[static_cast<std::size_t>(k)] = std::clamp(d, -cfg.look_around, cfg.look_around);
    }
  } else {
    for (int k = 0; k < kBoundaryCount; ++k)
      obs.distances[static_cast<std::size_t>(k)] =
          std::clamp(b[static_cast<std::size_t>(k)] - y, -cfg.look_around, cfg.look_around);
  }
  return obs;
}

std::vector<Observation> stand_observations(const Realization& real, Point from, Point to, const ToolConfig& cfg,
                                            bool noisy, std::uint64_t stand_index) {
  if (!(to.x > from.x)) throw DomainError("stand must advance laterally (x1 > x0)");
  const int s = cfg.sub_locations_per_stand;
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(s));
  for (int i = 1; i <= s; ++i) {
    const double x = i == s ? to.x : from.x + i * (to.x - from.x) / s;
    const double y = i == s ? to.y : from.y + i * (to.y - from.y) / s;
    const auto index = stand_index * static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(i);
    out.push_back(observe(real, x, y, cfg, noisy, index));
  }
  return out;
}

}  // namespace gsb
