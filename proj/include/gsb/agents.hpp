#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gsb/dss_agent.hpp"
#include "gsb/engine.hpp"

namespace gsb {

class EpisodeLogWriter;

// A steering policy. Agents see the ensemble and the decision geometry, never the truth.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual Decision choose(const Ensemble& ens, const DecisionContext& ctx) = 0;
};

class DssAgent : public Agent {
 public:
  DssAgent(AgentConfig cfg, ScoringConfig scoring) : cfg_(cfg), scoring_(scoring) {}
  std::string name() const override { return "dss"; }
  Decision choose(const Ensemble& ens, const DecisionContext& ctx) override;
  const DecisionReport& last_report() const { return last_; }

 private:
  AgentConfig cfg_;
  ScoringConfig scoring_;
  DecisionReport last_;
};

// One-stand lookahead: maximizes the mean score of the next stand alone.
class GreedyAgent : public Agent {
 public:
  explicit GreedyAgent(ScoringConfig scoring) : scoring_(scoring) {}
  std::string name() const override { return "greedy"; }
  Decision choose(const Ensemble& ens, const DecisionContext& ctx) override;

 private:
  ScoringConfig scoring_;
};

// Uniform over stop and every legal continue.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed);
  std::string name() const override { return "random"; }
  Decision choose(const Ensemble& ens, const DecisionContext& ctx) override;

 private:
  std::mt19937_64 rng_;
};

std::unique_ptr<Agent> make_agent(const std::string& kind, const EpisodeConfig& cfg, std::uint64_t seed,
                                  unsigned threads = 0);

struct EpisodeRun {
  EpisodeState final_state;
  std::vector<Decision> decisions;
  std::vector<double> decision_seconds;
};

struct RunLabels {
  std::string episode_id = "episode";
  std::string participant_id = "agent";
  std::string round_id = "round";
};

// decide -> commit until finished; optionally records every step to `log`.
EpisodeRun run_episode(const Engine& engine, Agent& agent, EpisodeLogWriter* log = nullptr,
                       const RunLabels& labels = {});

}  // namespace gsb
