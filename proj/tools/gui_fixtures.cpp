// Writes engine-side reference data for the GUI contract tests: legal cone ranges
// for sampled bit states, legal_moves after real commits, and percentile bands.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include "gsb/api_server.hpp"
#include "gsb/random.hpp"
#include "gsb/serialization.hpp"

using namespace gsb;

namespace {

json cone_cases(const EpisodeConfig& cfg, std::uint64_t seed) {
  const Engine engine(cfg);
  const auto& lat = engine.lattice();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> node(0, lat.count() - 1);
  std::uniform_int_distribution<int> rise(-12, 12);
  json cases = json::array();
  for (int n = 0; n < 200; ++n) {
    const int i = node(rng);
    const double dip = n % 5 == 0 ? cfg.initial_dip : dip_degrees(rise(rng) * lat.spacing(), cfg.stand_length);
    const auto [lo, hi] = legal_target_range(lat, i, dip, cfg.stand_length, cfg.dogleg_limit);
    cases.push_back({{"node", i}, {"dip", dip}, {"lo", lo}, {"hi", hi}});
  }
  // legal_moves after committed stands, so the fixture also covers the engine path.
  json walks = json::array();
  for (int w = 0; w < 6; ++w) {
    auto state = engine.new_episode();
    json steps = json::array();
    while (!state.finished && state.decisions_taken < 4) {
      const auto moves = engine.legal_moves(state);
      json ys = json::array();
      for (std::size_t m = 1; m < moves.size(); ++m) ys.push_back(moves[m].y);
      steps.push_back({{"drilled", points_json(state.drilled.points)}, {"legal_y", ys}});
      std::uniform_int_distribution<std::size_t> pick(1, moves.size() - 1);
      state = engine.commit(state, moves[pick(rng)]);
    }
    walks.push_back(steps);
  }
  return json{{"config", cfg}, {"geometry", geometry_json(engine)}, {"cases", cases}, {"walks", walks}};
}

json band_case(const std::vector<double>& scores) {
  ScoreDistribution dist;
  std::vector<double> values;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    dist.entries.push_back({scores[i], i});
    values.push_back(scores[i]);
  }
  dist.percentiles = decile_summary(values);
  json entries = json::array();
  for (const auto& e : dist.entries) entries.push_back({{"score", e.score}, {"realization", e.realization}});
  json bands = json::array();
  for (int b = 0; b <= kDecileCount; ++b) bands.push_back(select_percentile_band(dist, b));
  return json{{"scores", entries}, {"percentiles", dist.percentiles}, {"bands", bands}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gui_fixtures OUT.json\n";
    return 2;
  }
  json cones = json::array();
  auto cfg = EpisodeConfig::defaults();
  cfg.ensemble_size = 8;
  cones.push_back(cone_cases(cfg, 1));
  auto steep = cfg;
  steep.dogleg_limit = 3.5;
  steep.initial_dip = 4.0;
  cones.push_back(cone_cases(steep, 2));
  auto coarse = cfg;
  coarse.y_grid_spacing = 0.5;
  coarse.stand_length = 20.0;
  coarse.dogleg_limit = 1.0;
  cones.push_back(cone_cases(coarse, 3));

  json bands = json::array();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(200.0, 80.0);
  std::vector<double> distinct(120);
  for (auto& v : distinct) v = normal(rng);
  bands.push_back(band_case(distinct));
  bands.push_back(band_case(std::vector<double>(120, 42.5)));
  std::vector<double> ties(120);
  std::uniform_int_distribution<int> few(0, 4);
  for (auto& v : ties) v = 10.0 * few(rng);
  bands.push_back(band_case(ties));
  std::vector<double> ramp(120);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>((i * 37) % 120);
  bands.push_back(band_case(ramp));

  std::ofstream(argv[1]) << json{{"cones", cones}, {"bands", bands}}.dump() << '\n';
  return 0;
}
