// Acceptance gate: one PASS/FAIL line per primary criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <string>
#include <unistd.h>

#include "gsb/agents.hpp"
#include "gsb/analysis.hpp"
#include "gsb/episode_log.hpp"
#include "gsb/errors.hpp"
#include "support.hpp"

using namespace gsb;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %-24s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void dp_oracle() {
  const auto started = Clock::now();
  const ScoringConfig scoring;
  int instances = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 150; ++seed, ++instances) {
    const auto t = test::random_toy(seed);
    const DecisionGraph graph(t.ctx);
    const auto table = solve_realization(t.real, graph, t.cfg, scoring);
    worst = std::max(worst, std::abs(table.root_value - test::brute_force_value(t.real, t.ctx, t.cfg, scoring, 0,
                                                                                t.ctx.bit_node, t.ctx.incoming_dip)));
    for (int k = 1; k <= graph.stages(); ++k) {
      const auto& st = graph.stage(k);
      for (int i = 0; i < graph.nodes(); ++i)
        for (int d = st.delta_min; d < st.delta_min + st.delta_count; ++d)
          if (st.has(i, d))
            worst = std::max(worst, std::abs(table.value(graph, k, i, d) -
                                             test::brute_force_value(t.real, t.ctx, t.cfg, scoring, k, i,
                                                                     graph.incoming_dip(k, i, d))));
    }
  }
  const double secs = seconds_since(started);
  report(worst <= 1e-9 && secs < 60.0, "dp_oracle",
         fmt("%d toy instances, max |DP - enumeration| = %.3g (tol 1e-9), %.2f s (limit 60 s)", instances, worst, secs));
}

void decision_rule() {
  const ScoringConfig scoring;
  int matches = 0;
  const int total = 20;
  for (std::uint64_t seed = 1; seed <= total; ++seed) {
    const auto t = test::random_toy(seed + 1000);
    PriorConfig prior;
    prior.variogram_sill = 1.0;
    prior.variogram_range = 60.0;
    prior.seed = seed;
    const auto ens = sample_prior(prior, t.real.grid, 10);
    matches += decide(ens, t.ctx, t.cfg, scoring).decision == test::brute_force_decision(ens, t.ctx, t.cfg, scoring);
  }
  report(matches == total, "decision_rule", fmt("%d/%d ensembles: decide == brute-force argmax", matches, total));
}

struct TimedRun {
  EpisodeRun run;
  double seconds;
};

TimedRun timed_dss(const Engine& engine, unsigned threads) {
  DssAgent agent({0.9, 0.0, threads}, engine.config().scoring);
  const auto t0 = Clock::now();
  auto run = run_episode(engine, agent);
  return {std::move(run), seconds_since(t0)};
}

void determinism_and_performance() {
  int identical = 0;
  const int seeds = 10;
  double worst_episode = 0.0, worst_decide = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    auto cfg = EpisodeConfig::defaults();
    cfg.truth_seed = static_cast<std::uint64_t>(s);
    cfg.prior.seed = 2019 + static_cast<std::uint64_t>(s) - 1;
    const Engine engine(cfg);
    const auto a = timed_dss(engine, 1);
    const auto b = timed_dss(Engine(cfg), 0);
    const bool same = a.run.decisions == b.run.decisions &&
                      a.run.final_state.final_result->score == b.run.final_state.final_result->score &&
                      a.run.final_state.ensemble == b.run.final_state.ensemble;
    identical += same;
    worst_episode = std::max({worst_episode, a.seconds, b.seconds});
    for (const auto* r : {&a.run, &b.run})
      for (double d : r->decision_seconds) worst_decide = std::max(worst_decide, d);
  }
  report(identical == seeds, "determinism",
         fmt("%d/%d seeds: identical decisions, scores and ensembles across two runs (1 vs auto threads)", identical,
             seeds));
  report(worst_episode < 60.0 && worst_decide < 10.0, "performance",
         fmt("slowest 14-decision episode %.2f s (limit 60 s), slowest decide %.3f s (limit 10 s), 120 members",
             worst_episode, worst_decide));
}

void enkf_kalman() {
  int passed = 0;
  double worst_mean = 0.0, worst_var = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = test::kalman_1d_trial(seed);
    const bool ok = std::abs(m.mean - 11.6) <= 0.35 && std::abs(m.var - 0.8) <= 0.3;
    passed += ok;
    worst_mean = std::max(worst_mean, std::abs(m.mean - 11.6));
    worst_var = std::max(worst_var, std::abs(m.var - 0.8));
  }
  report(passed >= 18, "enkf_vs_kalman",
         fmt("%d/20 seeds within mean 11.6 +-0.35 and var 0.8 +-0.3 (need 18); worst |dmean| %.3f, |dvar| %.3f",
             passed, worst_mean, worst_var));
}

void scoring_oracles() {
  const LateralGrid g(0.0, 10.0, 11);
  const auto r = test::flat_realization(g, {10, 12, 20, 23});
  const ScoringConfig cfg;
  const double sweet = score_segment({0, 11}, {100, 11}, r, cfg);
  const double shale = score_segment({0, 5}, {30, 5}, r, cfg);
  report(std::abs(sweet - 391.4) <= 1e-6 && std::abs(shale + 2.58) <= 1e-6, "scoring_oracles",
         fmt("sweet spot %.9f (391.4), shale %.9f (-2.58), tol 1e-6", sweet, shale));
}

// Lands toward the prior mean of b1 plus 1 m with legal moves, then reports the
// b1 spread at the grid nodes the first five stands covered.
void contraction() {
  std::vector<double> ratios;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    auto cfg = EpisodeConfig::defaults();
    cfg.truth_seed = 100 + s;
    cfg.prior.seed = 5000 + s;
    const Engine engine(cfg);
    auto state = engine.new_episode();
    const auto prior = state.ensemble;
    const double target = cfg.prior.mean_depths[0] + 1.0;
    for (int k = 0; k < 5; ++k) {
      const auto moves = engine.legal_moves(state);
      const auto best = std::min_element(moves.begin() + 1, moves.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.y - target) < std::abs(b.y - target);
      });
      state = engine.commit(state, *best);
    }
    const double x_end = state.drilled.points.back().x;
    double before = 0.0, after = 0.0;
    int nodes = 0;
    for (std::size_t i = 0; i < prior.grid.size(); ++i) {
      if (prior.grid.x(i) <= 0.0 || prior.grid.x(i) > x_end) continue;
      std::vector<double> pre, post;
      for (const auto& m : prior.members) pre.push_back(m.boundaries[0][i]);
      for (const auto& m : state.ensemble.members) post.push_back(m.boundaries[0][i]);
      before += std::sqrt(test::moments(pre).var);
      after += std::sqrt(test::moments(post).var);
      ++nodes;
    }
    ratios.push_back(after / before);
  }
  const double r = mean(ratios);
  report(r < 0.5, "uncertainty_contraction",
         fmt("mean b1 std at observed nodes after 5 stands = %.1f%% of prior (limit 50%%), 20 seeds", 100.0 * r));
}

void dominance_and_playback() {
  const auto dir = fs::temp_directory_path() / ("gsb_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const int episodes = 50;
  std::map<std::string, std::vector<double>> pct;
  for (const std::string kind : {"dss", "greedy", "random"}) {
    EpisodeLogWriter log(dir / (kind + ".jsonl"));
    for (int i = 0; i < episodes; ++i) {
      auto cfg = EpisodeConfig::defaults();
      cfg.truth_seed = 1 + static_cast<std::uint64_t>(i);
      const Engine engine(cfg);
      auto agent = make_agent(kind, cfg, cfg.truth_seed);
      const auto run =
          run_episode(engine, *agent, &log, {kind + "-" + std::to_string(i), kind, "ep-" + std::to_string(i)});
      pct[kind].push_back(run.final_state.final_result->percent_of_optimal);
    }
  }
  const double dss = mean(pct["dss"]), greedy = mean(pct["greedy"]), random = mean(pct["random"]);
  report(dss > greedy && dss > random, "agent_dominance",
         fmt("%d episodes: dss %.2f%%, greedy %.2f%% (gap %.2f pp), random %.2f%% (gap %.2f pp)", episodes, dss,
             greedy, dss - greedy, random, dss - random));

  std::size_t replayed = 0;
  std::string problem;
  for (const std::string kind : {"dss", "greedy", "random"}) {
    try {
      replayed += playback(dir / (kind + ".jsonl")).size();
    } catch (const IntegrityError& e) {
      problem = e.what();
    }
  }
  auto logs = read_episode_log(dir / "dss.jsonl");
  auto& victim = logs[7];
  const auto original = victim.decisions[3].decision;
  victim.decisions[3].decision = Decision::go(original.y + 0.25);
  std::string detected;
  try {
    playback(logs, "dss.jsonl");
  } catch (const IntegrityError& e) {
    detected = e.what();
  }
  const bool named = detected.find("episode " + victim.episode_id) != std::string::npos &&
                     detected.find("step 3") != std::string::npos;
  report(problem.empty() && replayed == 3 * episodes && named, "playback_integrity",
         fmt("%zu logged episodes replayed with %s; injected mutation %s", replayed,
             problem.empty() ? "0 mismatches" : problem.c_str(),
             named ? ("detected: " + detected).c_str() : "NOT detected"));
  fs::remove_all(dir);
}

ParticipantResult fixture(const std::string& id, std::array<double, 3> p) {
  ParticipantResult r;
  r.participant_id = id;
  for (int k = 0; k < 3; ++k) r.rounds["r" + std::to_string(k + 1)] = {p[k], p[k], true, {}};
  return r;
}

void ranking_fixture() {
  // "dss" is beaten by some opponent in at most one round; "hp" owns a near-perfect round 1.
  const std::vector<ParticipantResult> field{fixture("hp", {92, 65, 70}),    fixture("dss", {72, 80, 83}),
                                             fixture("hp2", {60, 82, 55}),   fixture("hp3", {70, 50, 81}),
                                             fixture("hp4", {40, 45, 50}),   fixture("hp5", {20, 30, 25})};
  const std::map<std::string, std::string> digests{{"r1", "a"}, {"r2", "b"}, {"r3", "b"}};
  const auto comparative = comparative_ranking(field, "r1", {"r2", "r3"}, digests);
  const auto simple = simple_ranking(field, {"r1"});
  double field_best = 1e9;
  for (const auto& row : comparative) field_best = std::min({field_best, row.rank_star[0], row.rank_star[1]});
  const auto& top = comparative.front();
  const double best_star = std::min(top.rank_star[0], top.rank_star[1]);
  const bool dss_top = top.participant_id == "dss" && top.pairwise_losses == 0 && best_star == field_best;
  report(dss_top && simple.rows.front().participant_id == "hp", "ranking_fixture",
         fmt("comparative top = %s (best rank* %.1f of field best %.1f, %d pairwise losses); round-1 simple top = %s "
             "(%.0f%%)",
             top.participant_id.c_str(), best_star, field_best, top.pairwise_losses,
             simple.rows.front().participant_id.c_str(), simple.rows.front().mean_percent));
}

}  // namespace

int main() {
  dp_oracle();
  decision_rule();
  determinism_and_performance();
  enkf_kalman();
  scoring_oracles();
  contraction();
  dominance_and_playback();
  ranking_fixture();
  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
