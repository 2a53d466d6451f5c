#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gsb {

inline constexpr int kBoundaryCount = 4;

// Uniform, strictly ascending lateral positions shared by all realizations.
class LateralGrid {
 public:
  LateralGrid() = default;
  LateralGrid(double x0, double spacing, std::size_t count);

  // Grid starting at x_start whose last node is at or beyond x_end.
  static LateralGrid covering(double x_start, double x_end, double spacing);
  // Validates uniform ascending spacing; keeps the node values verbatim.
  static LateralGrid from_nodes(std::vector<double> nodes);

  std::size_t size() const { return nodes_.size(); }
  double x(std::size_t i) const { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  double spacing() const { return spacing_; }
  const std::vector<double>& nodes() const { return nodes_; }
  bool contains(double x) const;

  // Interval index i and weight w so that f(x) = (1 - w) f[i] + w f[i + 1].
  // Throws DomainError outside [front, back].
  std::pair<std::size_t, double> locate(double x) const;

  friend bool operator==(const LateralGrid&, const LateralGrid&) = default;

 private:
  std::vector<double> nodes_;
  double spacing_ = 0.0;
};

enum class Layer : int {
  overburden_shale = 1,
  top_sand = 2,
  middle_shale = 3,
  bottom_sand = 4,
  underburden_shale = 5,
};

struct LayerContext {
  Layer layer = Layer::overburden_shale;
  std::optional<double> roof;       // sand roof depth, sands only
  std::optional<double> thickness;  // roof-to-floor distance h, sands only
  bool is_sand() const { return layer == Layer::top_sand || layer == Layer::bottom_sand; }
};

// Four boundary depth curves on a lateral grid. Boundary k separates layer k
// from layer k + 1 in the shale-sand-shale-sand-shale stack.
struct Realization {
  LateralGrid grid;
  std::array<std::vector<double>, kBoundaryCount> boundaries;

  double boundary_at(int k, double x) const;
  std::array<double, kBoundaryCount> boundaries_at(double x) const;
  friend bool operator==(const Realization&, const Realization&) = default;
};

// y exactly on a boundary belongs to the deeper layer.
LayerContext layer_at(const Realization& real, double x, double y);

// Ordering b1 <= b2 <= b3 <= b4 and sand thickness >= min_thickness at all nodes.
bool satisfies_layering(const Realization& real, double min_thickness);

struct Ensemble {
  LateralGrid grid;
  std::vector<Realization> members;
  int generation = 0;

  std::size_t size() const { return members.size(); }
  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

enum class VariogramKind { gaussian, exponential };

struct PriorConfig {
  std::array<double, kBoundaryCount> mean_depths{10.0, 13.0, 20.0, 23.0};
  double variogram_range = 200.0;
  double variogram_sill = 4.0;
  VariogramKind variogram_kind = VariogramKind::gaussian;
  double min_thickness = 0.5;
  std::uint64_t seed = 2019;

  void validate() const;
};

// Correlation of boundary depth at lateral lag `distance` (practical-range convention).
double variogram_correlation(VariogramKind kind, double range, double distance);

inline constexpr int kMaxRejectionAttempts = 1000;

// Draws `count` members, each boundary a stationary Gaussian field around its mean.
// Members violating the layering invariants are redrawn. Throws ConfigError when a
// member exhausts the rejection budget.
Ensemble sample_prior(const PriorConfig& cfg, const LateralGrid& grid, std::size_t count);

// One realization from the same generator, on a stream disjoint from ensemble members.
Realization sample_truth(const PriorConfig& cfg, const LateralGrid& grid, std::uint64_t seed);

}  // namespace gsb
