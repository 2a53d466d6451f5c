#include "gsb/assimilation.hpp"

#include <cmath>

#include "gsb/errors.hpp"
#include "gsb/random.hpp"

namespace gsb {

void EnKFConfig::validate() const {
  if (!(obs_error_std > 0.0)) throw ConfigError("obs_error_std must be positive");
  if (!(inflation >= 1.0)) throw ConfigError("inflation must be >= 1");
  if (!(min_thickness > 0.0)) throw ConfigError("min_thickness must be positive");
}

Eigen::VectorXd to_state_vector(const Realization& real) {
  const auto n = static_cast<Eigen::Index>(real.grid.size());
  Eigen::VectorXd v(kBoundaryCount * n);
  for (int k = 0; k < kBoundaryCount; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      v(k * n + i) = real.boundaries[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  return v;
}

Realization from_state_vector(const Eigen::Ref<const Eigen::VectorXd>& state, const LateralGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (state.size() != kBoundaryCount * n) throw ValidationError("state vector length does not match grid");
  Realization real;
  real.grid = grid;
  for (int k = 0; k < kBoundaryCount; ++k) {
    auto& b = real.boundaries[static_cast<std::size_t>(k)];
    b.resize(grid.size());
    for (Eigen::Index i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = state(k * n + i);
  }
  return real;
}

Eigen::MatrixXd enkf_analysis(const Eigen::MatrixXd& states, const Eigen::MatrixXd& predicted,
                              const Eigen::VectorXd& observed, const Eigen::VectorXd& obs_std, bool perturb,
                              std::mt19937_64& rng, bool* degenerate) {
  const Eigen::Index members = states.cols();
  const Eigen::Index m = predicted.rows();
  if (predicted.cols() != members || observed.size() != m || obs_std.size() != m)
    throw ValidationError("EnKF dimension mismatch");
  if (members < 2) throw ValidationError("EnKF needs at least two members");

  const Eigen::MatrixXd state_anom = states.colwise() - states.rowwise().mean();
  const Eigen::MatrixXd pred_anom = predicted.colwise() - predicted.rowwise().mean();
  const bool flat = pred_anom.cwiseAbs().maxCoeff() == 0.0;
  if (degenerate) *degenerate = flat;
  if (flat) return states;

  const double scale = 1.0 / static_cast<double>(members - 1);
  const Eigen::MatrixXd cross = scale * state_anom * pred_anom.transpose();
  Eigen::MatrixXd innovation_cov = scale * pred_anom * pred_anom.transpose();
  innovation_cov.diagonal() += obs_std.cwiseProduct(obs_std);

  Eigen::MatrixXd innovations(m, members);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < members; ++j)
    for (Eigen::Index r = 0; r < m; ++r) {
      const double eps = perturb ? obs_std(r) * normal(rng) : 0.0;
      innovations(r, j) = observed(r) + eps - predicted(r, j);
    }

  const Eigen::MatrixXd weights = innovation_cov.ldlt().solve(innovations);
  return states + cross * weights;
}

void repair_layering(Realization& real, double min_thickness) {
  auto& b = real.boundaries;
  for (std::size_t i = 0; i < real.grid.size(); ++i) {
    for (std::size_t roof : {std::size_t{0}, std::size_t{2}}) {
      double& top = b[roof][i];
      double& floor = b[roof + 1][i];
      if (floor - top < min_thickness) {
        const double mid = 0.5 * (top + floor);
        top = mid - 0.5 * min_thickness;
        floor = mid + 0.5 * min_thickness;
      }
    }
    // Overlapping sands: close the middle shale to zero, moving each sand rigidly.
    if (b[2][i] < b[1][i]) {
      const double mid = 0.5 * (b[1][i] + b[2][i]);
      const double up = b[1][i] - mid;
      const double down = mid - b[2][i];
      b[0][i] -= up;
      b[1][i] = mid;
      b[2][i] = mid;
      b[3][i] += down;
    }
  }
}

AnalysisResult analysis_step(const Ensemble& ens, std::span<const Observation> truth_obs, const EnKFConfig& cfg,
                             const ToolConfig& tool) {
  cfg.validate();
  if (truth_obs.empty()) throw ValidationError("analysis needs at least one observation");
  for (const auto& o : truth_obs)
    if (!ens.grid.contains(o.x)) throw DomainError("observation x outside lateral grid");

  const auto members = static_cast<Eigen::Index>(ens.size());
  const auto dim = static_cast<Eigen::Index>(kBoundaryCount * ens.grid.size());
  const auto m = static_cast<Eigen::Index>(truth_obs.size() * kBoundaryCount);

  Eigen::MatrixXd states(dim, members);
  for (Eigen::Index j = 0; j < members; ++j) states.col(j) = to_state_vector(ens.members[static_cast<std::size_t>(j)]);
  std::vector<Realization> inflated;
  if (cfg.inflation != 1.0) {
    const Eigen::VectorXd mean = states.rowwise().mean();
    states = ((states.colwise() - mean) * cfg.inflation).colwise() + mean;
    inflated.reserve(ens.size());
    for (Eigen::Index j = 0; j < members; ++j) inflated.push_back(from_state_vector(states.col(j), ens.grid));
  }
  const auto& forecast = inflated.empty() ? ens.members : inflated;

  Eigen::MatrixXd predicted(m, members);
  for (Eigen::Index j = 0; j < members; ++j) {
    const auto& member = forecast[static_cast<std::size_t>(j)];
    for (std::size_t o = 0; o < truth_obs.size(); ++o) {
      const auto pred = observe(member, truth_obs[o].x, truth_obs[o].y, tool, false);
      for (int k = 0; k < kBoundaryCount; ++k)
        predicted(static_cast<Eigen::Index>(o * kBoundaryCount) + k, j) = pred.distances[static_cast<std::size_t>(k)];
    }
  }

  Eigen::VectorXd observed(m);
  for (std::size_t o = 0; o < truth_obs.size(); ++o)
    for (int k = 0; k < kBoundaryCount; ++k)
      observed(static_cast<Eigen::Index>(o * kBoundaryCount) + k) = truth_obs[o].distances[static_cast<std::size_t>(k)];
  const Eigen::VectorXd obs_std = Eigen::VectorXd::Constant(m, cfg.obs_error_std);

  auto rng = keyed_rng({cfg.seed, stream::enkf_perturbation, static_cast<std::uint64_t>(ens.generation)});
  bool degenerate = false;
  const Eigen::MatrixXd analysed = enkf_analysis(states, predicted, observed, obs_std, cfg.perturb_obs, rng, &degenerate);

  AnalysisResult result;
  result.status = degenerate ? UpdateStatus::skipped_degenerate : UpdateStatus::applied;
  result.ensemble.grid = ens.grid;
  result.ensemble.generation = ens.generation + 1;
  if (degenerate) {
    result.ensemble.members = ens.members;
    return result;
  }
  result.ensemble.members.reserve(ens.size());
  for (Eigen::Index j = 0; j < members; ++j) {
    Realization r = from_state_vector(analysed.col(j), ens.grid);
    repair_layering(r, cfg.min_thickness);
    result.ensemble.members.push_back(std::move(r));
  }
  return result;
}

AnalysisResult update_after_stand(const Ensemble& ens, const Realization& truth, Point from, Point to,
                                  const ToolConfig& tool, const EnKFConfig& cfg, std::uint64_t stand_index) {
  const auto obs = stand_observations(truth, from, to, tool, true, stand_index);
  return analysis_step(ens, obs, cfg, tool);
}

}  // namespace gsb
