#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "gsb/dss_agent.hpp"
#include "gsb/geomodel.hpp"
#include "gsb/scoring.hpp"

namespace gsb::test {

inline Realization flat_realization(const LateralGrid& grid, std::array<double, 4> depths) {
  Realization r;
  r.grid = grid;
  for (int k = 0; k < 4; ++k) r.boundaries[static_cast<std::size_t>(k)].assign(grid.size(), depths[static_cast<std::size_t>(k)]);
  return r;
}

inline Ensemble ensemble_of(const LateralGrid& grid, std::vector<Realization> members) {
  Ensemble e;
  e.grid = grid;
  e.members = std::move(members);
  return e;
}

// Exhaustive search over every dog-leg-legal lattice path from (k, node) with the given
// incoming dip, stopping allowed anywhere. Legality is tested node by node.
inline double brute_force_value(const Realization& real, const DecisionContext& ctx, const AgentConfig& cfg,
                                const ScoringConfig& scoring, int k, int node, double dip) {
  const int stages = static_cast<int>(ctx.abscissas.size()) - 1;
  double best = cfg.stop_value;
  if (k == stages) return best;
  const double x0 = ctx.abscissas[static_cast<std::size_t>(k)];
  const double x1 = ctx.abscissas[static_cast<std::size_t>(k) + 1];
  const double y0 = ctx.lattice.y(node);
  for (int j = 0; j < ctx.lattice.count(); ++j) {
    const double y1 = ctx.lattice.y(j);
    const double new_dip = std::atan2(y1 - y0, x1 - x0) * 180.0 / 3.14159265358979323846;
    if (std::abs(new_dip - dip) > ctx.dogleg_limit + 1e-9) continue;
    const double seg = SegmentProfile(real, x0, x1).score(y0, y1, scoring);
    const double q = seg + cfg.discount * brute_force_value(real, ctx, cfg, scoring, k + 1, j, dip_degrees(y1 - y0, x1 - x0));
    best = std::max(best, q);
  }
  return best;
}

struct ToyInstance {
  Realization real;
  DecisionContext ctx;
  AgentConfig cfg;
};

// Small random instance: <= 4 stages, <= 7 lattice nodes, lattice straddling the top sand roof.
inline ToyInstance random_toy(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919 + 17);
  std::uniform_int_distribution<int> stage_count(1, 4), node_count(3, 7), pick(0, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int K = stage_count(rng);
  const int N = node_count(rng);
  const double spacing = std::array{0.25, 0.5, 1.0}[static_cast<std::size_t>(pick(rng))];
  const double stand = std::array{10.0, 20.0, 30.0}[static_cast<std::size_t>(pick(rng))];

  PriorConfig prior;
  prior.variogram_sill = 1.0;
  prior.variogram_range = 60.0;
  prior.seed = seed;
  const LateralGrid grid = LateralGrid::covering(0.0, K * stand, 10.0);
  ToyInstance t;
  t.real = sample_truth(prior, grid, seed);

  const double origin = 10.0 - spacing * (N / 2) + (unit(rng) - 0.5);
  t.ctx.lattice = YLattice(origin, spacing, 0, N);
  for (int k = 0; k <= K; ++k) t.ctx.abscissas.push_back(k * stand);
  t.ctx.dogleg_limit = 1.0 + 3.0 * unit(rng);
  t.ctx.bit_node = static_cast<int>(unit(rng) * N) % N;
  t.ctx.incoming_dip = (unit(rng) - 0.5) * 4.0;
  t.cfg.discount = std::array{0.9, 1.0, 0.5}[static_cast<std::size_t>(pick(rng))];
  t.cfg.threads = 1;
  return t;
}

}  // namespace gsb::test

#include "gsb/assimilation.hpp"
#include "gsb/random.hpp"

namespace gsb::test {

struct MomentPair {
  double mean = 0.0;
  double var = 0.0;
};

inline MomentPair moments(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, s / static_cast<double>(v.size() - 1)};
}

// One boundary node with prior N(10, 2^2) observed directly as 12 with error std 1
// by a tool at depth 0 whose look-around never saturates. The other boundaries sit
// far below with no spread and carry no information.
inline MomentPair kalman_1d_trial(std::uint64_t seed, std::size_t members = 120) {
  const LateralGrid grid(0.0, 10.0, 2);
  auto rng = keyed_rng({seed, 0x31444b46ULL});
  std::normal_distribution<double> prior(10.0, 2.0);
  Ensemble ens;
  ens.grid = grid;
  for (std::size_t m = 0; m < members; ++m) {
    const double b1 = prior(rng);
    ens.members.push_back(flat_realization(grid, {b1, 200.0, 300.0, 400.0}));
  }
  ToolConfig tool;
  tool.look_around = 1000.0;
  tool.noise_std = 1.0;
  EnKFConfig cfg;
  cfg.obs_error_std = 1.0;
  cfg.seed = seed;
  const Observation obs{0.0, 0.0, {12.0, 200.0, 300.0, 400.0}};
  const auto out = analysis_step(ens, std::span(&obs, 1), cfg, tool);
  std::vector<double> post;
  for (const auto& m : out.ensemble.members) post.push_back(m.boundaries[0][0]);
  return moments(post);
}

}  // namespace gsb::test

namespace gsb::test {

// Robust decision rule by exhaustion: for every legal immediate target, the member-ordered mean of
// seg + discount * best continuation; stop worth stop_value. Ties prefer stop, then the
// smaller |dip change|, then the shallower target.
inline Decision brute_force_decision(const Ensemble& ens, const DecisionContext& ctx, const AgentConfig& cfg,
                                     const ScoringConfig& scoring) {
  struct Option {
    bool stop;
    double y, change, value;
  };
  std::vector<Option> options{{true, 0.0, 0.0, cfg.stop_value}};
  if (ctx.abscissas.size() > 1) {
    const double x0 = ctx.abscissas[0], x1 = ctx.abscissas[1];
    const double y0 = ctx.lattice.y(ctx.bit_node);
    for (int j = 0; j < ctx.lattice.count(); ++j) {
      const double y1 = ctx.lattice.y(j);
      const double dip = std::atan2(y1 - y0, x1 - x0) * 180.0 / 3.14159265358979323846;
      if (std::abs(dip - ctx.incoming_dip) > ctx.dogleg_limit + 1e-9) continue;
      double sum = 0.0;
      for (const auto& m : ens.members) {
        const double seg = SegmentProfile(m, x0, x1).score(y0, y1, scoring);
        sum += seg + cfg.discount * brute_force_value(m, ctx, cfg, scoring, 1, j, dip_degrees(y1 - y0, x1 - x0));
      }
      options.push_back({false, y1, dip_degrees(y1 - y0, x1 - x0) - ctx.incoming_dip,
                         sum / static_cast<double>(ens.size())});
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < options.size(); ++i) {
    const auto& a = options[i];
    const auto& b = options[best];
    bool better = false;
    if (a.value != b.value)
      better = a.value > b.value;
    else if (a.stop != b.stop)
      better = a.stop;
    else if (std::abs(a.change) != std::abs(b.change))
      better = std::abs(a.change) < std::abs(b.change);
    else
      better = a.y < b.y;
    if (better) best = i;
  }
  return options[best].stop ? Decision::stop() : Decision::go(options[best].y);
}

}  // namespace gsb::test
