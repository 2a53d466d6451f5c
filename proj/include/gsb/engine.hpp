#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsb/assimilation.hpp"
#include "gsb/dss_agent.hpp"
#include "gsb/geometry.hpp"
#include "gsb/geomodel.hpp"
#include "gsb/measurement.hpp"
#include "gsb/scoring.hpp"

namespace gsb {

struct EpisodeConfig {
  double stand_length = 30.0;
  int max_decisions = 14;
  double dogleg_limit = 2.0;  // degrees of dip change per decision
  Point start{0.0, 4.5};
  double initial_dip = 0.0;
  double y_grid_spacing = 0.25;
  double x_grid_spacing = 10.0;
  std::size_t ensemble_size = 120;
  PriorConfig prior;
  ScoringConfig scoring;
  ToolConfig tool;
  EnKFConfig enkf;
  std::uint64_t truth_seed = 1;

  // Defaults with the start depth placed 12 m above the mean of the prior boundary depths.
  static EpisodeConfig defaults();
  void validate() const;

  LateralGrid lateral_grid() const;
  // start.x followed by the max_decisions decision abscissas.
  std::vector<double> abscissas() const;
  // Prior mean depths widened by four standard deviations, clipped to what the
  // dog-leg cone can reach from the start.
  YLattice lattice() const;
};

struct FinalResult {
  double score = 0.0;
  double percent_of_optimal = 0.0;
  double optimal_score = 0.0;
  bool reached_sand = false;
};

struct EpisodeState {
  Trajectory drilled;
  double current_dip = 0.0;
  int decisions_taken = 0;
  Ensemble ensemble;
  Realization truth;  // hidden from clients until the episode finishes
  bool finished = false;
  std::optional<FinalResult> final_result;
  UpdateStatus last_update = UpdateStatus::applied;
};

struct OptimalPlan {
  Trajectory trajectory;
  double score = 0.0;
};

// Stopping at once is always feasible, so the optimum is never negative. When it is
// zero, matching it counts as 100% and anything worse as 0%.
inline double percent_of_optimal(double score, double optimal) {
  if (optimal > 0.0) return 100.0 * score / optimal;
  return score >= optimal ? 100.0 : 0.0;
}

// Stateless episode rules for one configuration. All transitions return new
// states; inputs are never modified, so any state can be replayed from.
class Engine {
 public:
  explicit Engine(EpisodeConfig cfg);

  const EpisodeConfig& config() const { return cfg_; }
  const LateralGrid& grid() const { return grid_; }
  const YLattice& lattice() const { return lattice_; }
  const std::vector<double>& abscissas() const { return abscissas_; }

  EpisodeState new_episode() const;
  std::vector<Decision> legal_moves(const EpisodeState& state) const;
  // Throws ConstraintViolation for illegal continues and StateError once finished.
  EpisodeState commit(const EpisodeState& state, const Decision& decision) const;
  OptimalPlan optimal_on_truth(const Realization& truth) const;
  DecisionContext decision_context(const EpisodeState& state) const;

 private:
  void check_continue(const EpisodeState& state, double y) const;
  FinalResult finalize(const EpisodeState& state) const;

  EpisodeConfig cfg_;
  std::shared_ptr<const DecisionGraph> root_graph_;
  LateralGrid grid_;
  YLattice lattice_;
  std::vector<double> abscissas_;
};

}  // namespace gsb
