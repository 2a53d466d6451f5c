#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gsb/geometry.hpp"
#include "gsb/geomodel.hpp"
#include "gsb/measurement.hpp"

namespace gsb {

struct EnKFConfig {
  double obs_error_std = 0.1;  // must match ToolConfig::noise_std of the truth observations
  bool perturb_obs = true;
  double inflation = 1.0;
  double min_thickness = 0.5;  // used by the post-update layering repair
  std::uint64_t seed = 977;

  void validate() const;
};

enum class UpdateStatus {
  applied,
  skipped_degenerate,  // no member-to-member spread in any predicted observation
};

struct AnalysisResult {
  Ensemble ensemble;
  UpdateStatus status = UpdateStatus::applied;
};

// State layout: boundary-major, 4 x node count.
Eigen::VectorXd to_state_vector(const Realization& real);
Realization from_state_vector(const Eigen::Ref<const Eigen::VectorXd>& state, const LateralGrid& grid);

// Stochastic EnKF analysis on raw matrices. `states` is (dim x members), `predicted`
// is (obs x members). Observation errors are independent with the given stds.
// Returns the analysed states; `states` is returned unchanged when every row of
// `predicted` has zero spread.
Eigen::MatrixXd enkf_analysis(const Eigen::MatrixXd& states, const Eigen::MatrixXd& predicted,
                              const Eigen::VectorXd& observed, const Eigen::VectorXd& obs_std, bool perturb,
                              std::mt19937_64& rng, bool* degenerate = nullptr);

// Minimal deterministic fix of ordering and sand thickness at each node.
void repair_layering(Realization& real, double min_thickness);

// One analysis of the whole ensemble against observations of the truth. The
// generation counter always advances by one, also when the update is skipped.
AnalysisResult analysis_step(const Ensemble& ens, std::span<const Observation> truth_obs, const EnKFConfig& cfg,
                             const ToolConfig& tool);

// Noisy truth observations along the committed stand followed by one analysis.
AnalysisResult update_after_stand(const Ensemble& ens, const Realization& truth, Point from, Point to,
                                  const ToolConfig& tool, const EnKFConfig& cfg, std::uint64_t stand_index);

}  // namespace gsb
