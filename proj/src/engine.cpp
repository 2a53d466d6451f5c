#include "gsb/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gsb/errors.hpp"

namespace gsb {

EpisodeConfig EpisodeConfig::defaults() {
  EpisodeConfig cfg;
  const auto& m = cfg.prior.mean_depths;
  cfg.start = {0.0, std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(m.size()) - 12.0};
  cfg.enkf.obs_error_std = cfg.tool.noise_std;
  cfg.enkf.min_thickness = cfg.prior.min_thickness;
  return cfg;
}

void EpisodeConfig::validate() const {
  if (!(stand_length > 0.0)) throw ConfigError("stand_length must be positive");
  if (max_decisions < 1) throw ConfigError("max_decisions must be at least 1");
  if (!(dogleg_limit > 0.0)) throw ConfigError("dogleg_limit must be positive");
  if (!(y_grid_spacing > 0.0)) throw ConfigError("y_grid_spacing must be positive");
  if (!(x_grid_spacing > 0.0)) throw ConfigError("x_grid_spacing must be positive");
  if (ensemble_size < 2) throw ConfigError("ensemble_size must be at least 2");
  prior.validate();
  scoring.validate();
  tool.validate();
  enkf.validate();
  if (tool.noise_std > 0.0 && enkf.obs_error_std != tool.noise_std)
    throw ConfigError("enkf.obs_error_std must equal tool.noise_std");
}

LateralGrid EpisodeConfig::lateral_grid() const {
  return LateralGrid::covering(start.x, start.x + max_decisions * stand_length, x_grid_spacing);
}

std::vector<double> EpisodeConfig::abscissas() const {
  std::vector<double> xs(static_cast<std::size_t>(max_decisions) + 1);
  for (int k = 0; k <= max_decisions; ++k) xs[static_cast<std::size_t>(k)] = start.x + k * stand_length;
  return xs;
}

YLattice EpisodeConfig::lattice() const {
  const auto [lo_it, hi_it] = std::minmax_element(prior.mean_depths.begin(), prior.mean_depths.end());
  const double spread = 4.0 * std::sqrt(prior.variogram_sill);
  double lo = *lo_it - spread;
  double hi = *hi_it + spread;
  const double to_rad = std::numbers::pi / 180.0;
  double down = 0.0;
  double up = 0.0;
  for (int k = 1; k <= max_decisions; ++k) {
    down += stand_length * std::tan(std::min(89.0, initial_dip + k * dogleg_limit) * to_rad);
    up -= stand_length * std::tan(std::max(-89.0, initial_dip - k * dogleg_limit) * to_rad);
  }
  lo = std::max(lo, start.y - up);
  hi = std::min(hi, start.y + down);
  return YLattice::covering(start.y, y_grid_spacing, lo, hi);
}

namespace {

DecisionContext start_context(const EpisodeConfig& cfg, const YLattice& lattice) {
  DecisionContext ctx;
  ctx.abscissas = cfg.abscissas();
  ctx.lattice = lattice;
  ctx.dogleg_limit = cfg.dogleg_limit;
  ctx.bit_node = *lattice.index_of(cfg.start.y);
  ctx.incoming_dip = cfg.initial_dip;
  return ctx;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Engine::Engine(EpisodeConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  grid_ = cfg_.lateral_grid();
  lattice_ = cfg_.lattice();
  abscissas_ = cfg_.abscissas();
  root_graph_ = std::make_shared<const DecisionGraph>(start_context(cfg_, lattice_));
}

EpisodeState Engine::new_episode() const {
  EpisodeState state;
  state.ensemble = sample_prior(cfg_.prior, grid_, cfg_.ensemble_size);
  state.truth = sample_truth(cfg_.prior, grid_, cfg_.truth_seed);
  state.drilled.points = {cfg_.start};
  state.current_dip = cfg_.initial_dip;
  return state;
}

DecisionContext Engine::decision_context(const EpisodeState& state) const {
  DecisionContext ctx;
  const auto taken = static_cast<std::size_t>(state.decisions_taken);
  ctx.abscissas.assign(abscissas_.begin() + static_cast<std::ptrdiff_t>(taken), abscissas_.end());
  ctx.lattice = lattice_;
  ctx.dogleg_limit = cfg_.dogleg_limit;
  const auto node = lattice_.index_of(state.drilled.points.back().y);
  if (!node) throw StateError("bit depth is not on the depth lattice");
  ctx.bit_node = *node;
  ctx.incoming_dip = state.current_dip;
  return ctx;
}

std::vector<Decision> Engine::legal_moves(const EpisodeState& state) const {
  if (state.finished) throw StateError("episode already finished");
  std::vector<Decision> moves{Decision::stop()};
  if (state.decisions_taken >= cfg_.max_decisions) return moves;
  const auto ctx = decision_context(state);
  const auto [lo, hi] = legal_target_range(lattice_, ctx.bit_node, state.current_dip, cfg_.stand_length,
                                           cfg_.dogleg_limit);
  for (int j = lo; j <= hi; ++j) moves.push_back(Decision::go(lattice_.y(j)));
  return moves;
}

void Engine::check_continue(const EpisodeState& state, double y) const {
  if (state.decisions_taken >= cfg_.max_decisions)
    throw ConstraintViolation("max_decisions", "all " + std::to_string(cfg_.max_decisions) + " decisions used");
  if (!std::isfinite(y)) throw ConstraintViolation("lattice", "target depth is not a finite number");
  if (y < lattice_.y_min() - 1e-6 || y > lattice_.y_max() + 1e-6)
    throw ConstraintViolation("lattice_bounds", "target depth " + fmt(y) + " outside [" + fmt(lattice_.y_min()) +
                                                    ", " + fmt(lattice_.y_max()) + "]");
  const auto node = lattice_.index_of(y);
  if (!node)
    throw ConstraintViolation("lattice", "target depth " + fmt(y) + " is not on the " + fmt(lattice_.spacing()) +
                                             " m depth lattice");
  const double y_cur = state.drilled.points.back().y;
  const double y_next = lattice_.y(*node);
  if (!within_dogleg(y_next - y_cur, cfg_.stand_length, state.current_dip, cfg_.dogleg_limit)) {
    const double change = dip_degrees(y_next - y_cur, cfg_.stand_length) - state.current_dip;
    throw ConstraintViolation("dogleg", "dip change " + fmt(change) + " deg exceeds " +
                                            (change > 0 ? "+" : "-") + fmt(cfg_.dogleg_limit) + " deg");
  }
}

FinalResult Engine::finalize(const EpisodeState& state) const {
  FinalResult result;
  result.score = score_trajectory(state.drilled, state.truth, cfg_.scoring);
  result.optimal_score = optimal_on_truth(state.truth).score;
  result.percent_of_optimal = percent_of_optimal(result.score, result.optimal_score);
  result.reached_sand = reaches_sand(state.drilled, state.truth);
  return result;
}

EpisodeState Engine::commit(const EpisodeState& state, const Decision& decision) const {
  if (state.finished) throw StateError("episode already finished");
  EpisodeState next = state;
  if (decision.is_stop()) {
    next.finished = true;
    next.drilled.stopped_early = state.decisions_taken < cfg_.max_decisions;
    next.final_result = finalize(next);
    return next;
  }
  check_continue(state, decision.y);
  const Point from = state.drilled.points.back();
  const Point to{abscissas_[static_cast<std::size_t>(state.decisions_taken) + 1],
                 lattice_.y(*lattice_.index_of(decision.y))};
  auto update = update_after_stand(state.ensemble, state.truth, from, to, cfg_.tool, cfg_.enkf,
                                   static_cast<std::uint64_t>(state.decisions_taken));
  next.ensemble = std::move(update.ensemble);
  next.last_update = update.status;
  next.drilled.points.push_back(to);
  next.decisions_taken = state.decisions_taken + 1;
  next.current_dip = dip_degrees(to.y - from.y, to.x - from.x);
  if (next.decisions_taken == cfg_.max_decisions) {
    next.finished = true;
    next.final_result = finalize(next);
  }
  return next;
}

OptimalPlan Engine::optimal_on_truth(const Realization& truth) const {
  AgentConfig perfect;
  perfect.discount = 1.0;
  const auto table = solve_realization(truth, *root_graph_, perfect, cfg_.scoring);
  OptimalPlan plan;
  plan.trajectory.points = optimal_path(truth, *root_graph_, table, perfect, cfg_.scoring);
  plan.trajectory.stopped_early = static_cast<int>(plan.trajectory.points.size()) - 1 < cfg_.max_decisions;
  plan.score = score_trajectory(plan.trajectory, truth, cfg_.scoring);
  return plan;
}

}  // namespace gsb
