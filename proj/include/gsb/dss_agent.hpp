#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gsb/geometry.hpp"
#include "gsb/geomodel.hpp"
#include "gsb/scoring.hpp"

namespace gsb {

struct AgentConfig {
  double discount = 0.9;
  double stop_value = 0.0;
  unsigned threads = 0;  // members solved concurrently; 0 = hardware concurrency

  void validate() const;
};

// What the optimizer knows about the current decision: bit position, remaining
// abscissas and steering constraints. Holds no reference to the hidden truth.
struct DecisionContext {
  std::vector<double> abscissas;  // bit x followed by every remaining decision abscissa
  YLattice lattice;
  double dogleg_limit = 2.0;
  int bit_node = 0;
  double incoming_dip = 0.0;

  int stages() const { return static_cast<int>(abscissas.size()) - 1; }
};

// Lattice states reachable from the bit, with the legal target range of each.
// A state at stage k >= 1 is (node, delta) where delta = node - previous node; the
// incoming move fixes the dip, so it is part of the state. Independent of geology,
// so one graph serves every ensemble member.
class DecisionGraph {
 public:
  struct Stage {
    int delta_min = 0;
    int delta_count = 0;
    std::vector<int> target_lo;  // per state; target_lo > target_hi means no continue
    std::vector<int> target_hi;
    std::vector<std::uint8_t> reachable;
    // Union of target ranges over all states sharing a node; sizes the segment cache.
    std::vector<int> node_lo;
    std::vector<int> node_hi;

    std::size_t index(int node, int delta) const {
      return static_cast<std::size_t>(node) * static_cast<std::size_t>(delta_count) +
             static_cast<std::size_t>(delta - delta_min);
    }
    bool has(int node, int delta) const {
      return delta >= delta_min && delta < delta_min + delta_count && reachable[index(node, delta)] != 0;
    }
  };

  explicit DecisionGraph(const DecisionContext& ctx);

  const DecisionContext& context() const { return ctx_; }
  int stages() const { return ctx_.stages(); }
  int nodes() const { return ctx_.lattice.count(); }
  // stage(0) describes only the root (bit) state, stored at delta 0.
  const Stage& stage(int k) const { return stages_[static_cast<std::size_t>(k)]; }
  std::size_t state_count() const;
  // Incoming dip of a stage-k state (k >= 1), from the actual lattice depths.
  double incoming_dip(int k, int node, int delta) const;

 private:
  DecisionContext ctx_;
  std::vector<Stage> stages_;
};

// Optimal discounted continuation values of one realization over a DecisionGraph.
struct ValueTable {
  std::vector<std::vector<double>> values;  // values[k][state index], k = 0..K
  std::vector<double> root_q;               // continuation value of each root target
  int root_lo = 0;
  int root_hi = -1;
  double root_value = 0.0;

  double value(const DecisionGraph& graph, int k, int node, int delta) const {
    return values[static_cast<std::size_t>(k)][graph.stage(k).index(node, delta)];
  }
};

// Backward induction V[k](i, d) = max(stop, max_j seg_k(i -> j) + discount * V[k+1](j, j - i)).
ValueTable solve_realization(const Realization& real, const DecisionGraph& graph, const AgentConfig& cfg,
                             const ScoringConfig& scoring);

// Largest |V - (best action value)| over all reachable states; 0 for a consistent table.
double bellman_residual(const Realization& real, const DecisionGraph& graph, const ValueTable& table,
                        const AgentConfig& cfg, const ScoringConfig& scoring);

// Maximal-value lattice path of one realization from the bit (ties resolved like decide).
std::vector<Point> optimal_path(const Realization& real, const DecisionGraph& graph, const ValueTable& table,
                                const AgentConfig& cfg, const ScoringConfig& scoring);

struct Alternative {
  bool stop = false;
  int node = -1;
  double y = 0.0;
  double dip_change = 0.0;
  double mean_value = 0.0;
};

// Best alternative by mean value; exact ties prefer stop, then the smallest
// |dip change|, then the shallower target.
std::size_t robust_argmax(std::span<const Alternative> alternatives);

struct DecisionReport {
  Decision decision;
  std::vector<Alternative> alternatives;  // stop first, then continues by ascending depth
  std::size_t chosen = 0;
  double seconds = 0.0;
};

// Robust immediate decision: for every admissible target y_i (and stop), the mean over
// members of seg(bit -> y_i | M_j) + discount * V_j(y_i), then the argmax.
DecisionReport decide(const Ensemble& ens, const DecisionContext& ctx, const AgentConfig& cfg,
                      const ScoringConfig& scoring);

}  // namespace gsb
