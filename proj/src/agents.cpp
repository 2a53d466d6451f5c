#include "gsb/agents.hpp"

#include <chrono>

#include "gsb/episode_log.hpp"
#include "gsb/errors.hpp"
#include "gsb/random.hpp"

namespace gsb {

Decision DssAgent::choose(const Ensemble& ens, const DecisionContext& ctx) {
  last_ = decide(ens, ctx, cfg_, scoring_);
  return last_.decision;
}

Decision GreedyAgent::choose(const Ensemble& ens, const DecisionContext& ctx) {
  std::vector<Alternative> alts{{true, -1, 0.0, 0.0, 0.0}};
  if (ctx.stages() > 0) {
    const auto& lat = ctx.lattice;
    const double x0 = ctx.abscissas[0];
    const double x1 = ctx.abscissas[1];
    const double y0 = lat.y(ctx.bit_node);
    const auto [lo, hi] = legal_target_range(lat, ctx.bit_node, ctx.incoming_dip, x1 - x0, ctx.dogleg_limit);
    std::vector<SegmentProfile> profiles;
    profiles.reserve(ens.size());
    for (const auto& m : ens.members) profiles.emplace_back(m, x0, x1);
    for (int j = lo; j <= hi; ++j) {
      double sum = 0.0;
      for (const auto& p : profiles) sum += p.score(y0, lat.y(j), scoring_);
      const double change = dip_degrees(lat.y(j) - y0, x1 - x0) - ctx.incoming_dip;
      alts.push_back({false, j, lat.y(j), change, sum / static_cast<double>(ens.size())});
    }
  }
  const auto& pick = alts[robust_argmax(alts)];
  return pick.stop ? Decision::stop() : Decision::go(pick.y);
}

RandomAgent::RandomAgent(std::uint64_t seed) : rng_(keyed_rng({seed, stream::random_agent})) {}

Decision RandomAgent::choose(const Ensemble&, const DecisionContext& ctx) {
  if (ctx.stages() <= 0) return Decision::stop();
  const auto& lat = ctx.lattice;
  const auto [lo, hi] = legal_target_range(lat, ctx.bit_node, ctx.incoming_dip,
                                           ctx.abscissas[1] - ctx.abscissas[0], ctx.dogleg_limit);
  const int options = std::max(0, hi - lo + 1);
  std::uniform_int_distribution<int> pick(0, options);
  const int k = pick(rng_);
  return k == options ? Decision::stop() : Decision::go(lat.y(lo + k));
}

std::unique_ptr<Agent> make_agent(const std::string& kind, const EpisodeConfig& cfg, std::uint64_t seed,
                                  unsigned threads) {
  if (kind == "dss") {
    AgentConfig a;
    a.threads = threads;
    return std::make_unique<DssAgent>(a, cfg.scoring);
  }
  if (kind == "greedy") return std::make_unique<GreedyAgent>(cfg.scoring);
  if (kind == "random") return std::make_unique<RandomAgent>(seed);
  throw ConfigError("unknown agent '" + kind + "' (expected dss, greedy or random)");
}

EpisodeRun run_episode(const Engine& engine, Agent& agent, EpisodeLogWriter* log, const RunLabels& labels) {
  EpisodeRun run;
  EpisodeState state = engine.new_episode();
  const std::string digest = config_digest(engine.config());
  if (log) log->start(labels.episode_id, labels.participant_id, labels.round_id, engine.config());
  int seq = 0;
  while (!state.finished) {
    const auto started = std::chrono::steady_clock::now();
    const Decision d = agent.choose(state.ensemble, engine.decision_context(state));
    run.decision_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
    state = engine.commit(state, d);
    run.decisions.push_back(d);
    if (log) log->decision(labels.episode_id, digest, seq, d, state.ensemble);
    ++seq;
  }
  if (log) log->final(labels.episode_id, digest, state);
  run.final_state = std::move(state);
  return run;
}

}  // namespace gsb
