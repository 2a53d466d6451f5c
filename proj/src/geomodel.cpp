#include "gsb/geomodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "gsb/errors.hpp"
#include "gsb/random.hpp"

namespace gsb {

LateralGrid::LateralGrid(double x0, double spacing, std::size_t count) : spacing_(spacing) {
  if (!(spacing > 0.0)) throw ConfigError("lateral grid spacing must be positive");
  if (count < 2) throw ConfigError("lateral grid needs at least two nodes");
  nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) nodes_[i] = x0 + static_cast<double>(i) * spacing;
}

LateralGrid LateralGrid::covering(double x_start, double x_end, double spacing) {
  if (!(spacing > 0.0)) throw ConfigError("lateral grid spacing must be positive");
  const auto intervals = static_cast<std::size_t>(std::ceil((x_end - x_start) / spacing - 1e-9));
  return LateralGrid(x_start, spacing, std::max<std::size_t>(intervals, 1) + 1);
}

LateralGrid LateralGrid::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw ValidationError("lateral grid needs at least two nodes");
  const double spacing = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  if (!(spacing > 0.0)) throw ValidationError("lateral grid must be strictly ascending");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double step = nodes[i] - nodes[i - 1];
    if (!(step > 0.0) || std::abs(step - spacing) > 1e-6 * std::max(1.0, spacing))
      throw ValidationError("lateral grid must be uniformly spaced (node " + std::to_string(i) + ")");
  }
  LateralGrid g;
  g.nodes_ = std::move(nodes);
  g.spacing_ = spacing;
  return g;
}

bool LateralGrid::contains(double x) const {
  return !nodes_.empty() && x >= nodes_.front() && x <= nodes_.back();
}

std::pair<std::size_t, double> LateralGrid::locate(double x) const {
  if (!contains(x))
    throw DomainError("x = " + std::to_string(x) + " outside lateral grid [" + std::to_string(front()) + ", " +
                      std::to_string(back()) + "]");
  const std::size_t last = nodes_.size() - 1;
  auto i = static_cast<std::size_t>(std::floor((x - nodes_.front()) / spacing_));
  i = std::min(i, last - 1);
  // Guard against rounding in the division near node positions.
  while (i > 0 && x < nodes_[i]) --i;
  while (i + 1 < last && x >= nodes_[i + 1]) ++i;
  const double w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return {i, std::clamp(w, 0.0, 1.0)};
}

double Realization::boundary_at(int k, double x) const {
  const auto [i, w] = grid.locate(x);
  const auto& b = boundaries[static_cast<std::size_t>(k)];
  if (w == 0.0) return b[i];
  if (w == 1.0) return b[i + 1];
  return (1.0 - w) * b[i] + w * b[i + 1];
}

std::array<double, kBoundaryCount> Realization::boundaries_at(double x) const {
  const auto [i, w] = grid.locate(x);
  std::array<double, kBoundaryCount> out{};
  for (int k = 0; k < kBoundaryCount; ++k) {
    const auto& b = boundaries[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k)] = w == 0.0 ? b[i] : w == 1.0 ? b[i + 1] : (1.0 - w) * b[i] + w * b[i + 1];
  }
  return out;
}

LayerContext layer_at(const Realization& real, double x, double y) {
  const auto b = real.boundaries_at(x);
  LayerContext ctx;
  if (y < b[0]) {
    ctx.layer = Layer::overburden_shale;
  } else if (y < b[1]) {
    ctx.layer = Layer::top_sand;
    ctx.roof = b[0];
    ctx.thickness = b[1] - b[0];
  } else if (y < b[2]) {
    ctx.layer = Layer::middle_shale;
  } else if (y < b[3]) {
    ctx.layer = Layer::bottom_sand;
    ctx.roof = b[2];
    ctx.thickness = b[3] - b[2];
  } else {
    ctx.layer = Layer::underburden_shale;
  }
  return ctx;
}

bool satisfies_layering(const Realization& real, double min_thickness) {
  const auto& b = real.boundaries;
  for (std::size_t i = 0; i < real.grid.size(); ++i) {
    if (!(b[0][i] <= b[1][i] && b[1][i] <= b[2][i] && b[2][i] <= b[3][i])) return false;
    if (b[1][i] - b[0][i] < min_thickness || b[3][i] - b[2][i] < min_thickness) return false;
  }
  return true;
}

void PriorConfig::validate() const {
  if (!(variogram_range > 0.0)) throw ConfigError("variogram range must be positive");
  if (!(variogram_sill > 0.0)) throw ConfigError("variogram sill must be positive");
  if (!(min_thickness > 0.0)) throw ConfigError("min_thickness must be positive");
  for (int k = 1; k < kBoundaryCount; ++k)
    if (!(mean_depths[static_cast<std::size_t>(k - 1)] <= mean_depths[static_cast<std::size_t>(k)]))
      throw ConfigError("mean boundary depths must be ordered ascending");
}

double variogram_correlation(VariogramKind kind, double range, double distance) {
  const double r = std::abs(distance) / range;
  switch (kind) {
    case VariogramKind::gaussian:
      return std::exp(-3.0 * r * r);
    case VariogramKind::exponential:
      return std::exp(-3.0 * r);
  }
  return 0.0;
}

namespace {

// Square-root factor of the field covariance. The Gaussian model is numerically
// rank-deficient on dense grids, so an eigen factorization with clipped spectrum
// replaces Cholesky.
Eigen::MatrixXd field_factor(const PriorConfig& cfg, const LateralGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cov(i, j) = cfg.variogram_sill *
                  variogram_correlation(cfg.variogram_kind, cfg.variogram_range,
                                        grid.x(static_cast<std::size_t>(i)) - grid.x(static_cast<std::size_t>(j)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

Realization draw_layered(const PriorConfig& cfg, const LateralGrid& grid, const Eigen::MatrixXd& factor,
                         std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(n);
  Realization real;
  real.grid = grid;
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    for (int k = 0; k < kBoundaryCount; ++k) {
      for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
      const Eigen::VectorXd field = factor * z;
      auto& b = real.boundaries[static_cast<std::size_t>(k)];
      b.resize(grid.size());
      for (Eigen::Index i = 0; i < n; ++i)
        b[static_cast<std::size_t>(i)] = cfg.mean_depths[static_cast<std::size_t>(k)] + field(i);
    }
    if (satisfies_layering(real, cfg.min_thickness)) return real;
  }
  throw ConfigError("prior rejection budget exhausted: sill " + std::to_string(cfg.variogram_sill) +
                    " is incompatible with min_thickness " + std::to_string(cfg.min_thickness) +
                    " and the mean depths");
}

}  // namespace

Ensemble sample_prior(const PriorConfig& cfg, const LateralGrid& grid, std::size_t count) {
  cfg.validate();
  if (count < 2) throw ConfigError("ensemble needs at least two members");
  const Eigen::MatrixXd factor = field_factor(cfg, grid);
  Ensemble ens;
  ens.grid = grid;
  ens.members.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    auto rng = keyed_rng({cfg.seed, stream::prior_member, m});
    ens.members.push_back(draw_layered(cfg, grid, factor, rng));
  }
  return ens;
}

Realization sample_truth(const PriorConfig& cfg, const LateralGrid& grid, std::uint64_t seed) {
  cfg.validate();
  const Eigen::MatrixXd factor = field_factor(cfg, grid);
  auto rng = keyed_rng({seed, stream::truth});
  return draw_layered(cfg, grid, factor, rng);
}

}  // namespace gsb
