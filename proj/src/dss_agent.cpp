#include "gsb/dss_agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "gsb/errors.hpp"

namespace gsb {

void AgentConfig::validate() const {
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("discount must be in (0, 1]");
  if (threads > 256) throw ConfigError("thread count out of range");
}

DecisionGraph::DecisionGraph(const DecisionContext& ctx) : ctx_(ctx) {
  if (ctx_.abscissas.empty()) throw ConfigError("decision context needs the bit abscissa");
  for (std::size_t k = 1; k < ctx_.abscissas.size(); ++k)
    if (!(ctx_.abscissas[k] > ctx_.abscissas[k - 1])) throw ConfigError("decision abscissas must ascend");
  if (ctx_.bit_node < 0 || ctx_.bit_node >= ctx_.lattice.count()) throw ConfigError("bit is off the depth lattice");

  const int K = stages();
  const int N = nodes();
  const auto& lat = ctx_.lattice;
  stages_.resize(static_cast<std::size_t>(K) + 1);

  Stage& root = stages_[0];
  root.delta_min = 0;
  root.delta_count = 1;
  root.reachable.assign(static_cast<std::size_t>(N), 0);
  root.reachable[static_cast<std::size_t>(ctx_.bit_node)] = 1;

  for (int k = 0; k <= K; ++k) {
    Stage& st = stages_[static_cast<std::size_t>(k)];
    const std::size_t size = st.reachable.size();
    st.target_lo.assign(size, 0);
    st.target_hi.assign(size, -1);
    st.node_lo.assign(static_cast<std::size_t>(N), std::numeric_limits<int>::max());
    st.node_hi.assign(static_cast<std::size_t>(N), std::numeric_limits<int>::min());
    if (k == K) break;

    const double dx = ctx_.abscissas[static_cast<std::size_t>(k) + 1] - ctx_.abscissas[static_cast<std::size_t>(k)];
    int dmin = std::numeric_limits<int>::max();
    int dmax = std::numeric_limits<int>::min();
    for (int i = 0; i < N; ++i) {
      for (int d = st.delta_min; d < st.delta_min + st.delta_count; ++d) {
        const std::size_t idx = st.index(i, d);
        if (!st.reachable[idx]) continue;
        const double dip = k == 0 ? ctx_.incoming_dip : incoming_dip(k, i, d);
        const auto [lo, hi] = legal_target_range(lat, i, dip, dx, ctx_.dogleg_limit);
        st.target_lo[idx] = lo;
        st.target_hi[idx] = hi;
        if (lo > hi) continue;
        auto& nlo = st.node_lo[static_cast<std::size_t>(i)];
        auto& nhi = st.node_hi[static_cast<std::size_t>(i)];
        nlo = std::min(nlo, lo);
        nhi = std::max(nhi, hi);
        dmin = std::min(dmin, lo - i);
        dmax = std::max(dmax, hi - i);
      }
    }

    Stage& next = stages_[static_cast<std::size_t>(k) + 1];
    if (dmin > dmax) {
      next.delta_min = 0;
      next.delta_count = 0;
      continue;
    }
    next.delta_min = dmin;
    next.delta_count = dmax - dmin + 1;
    next.reachable.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(next.delta_count), 0);
    for (int i = 0; i < N; ++i)
      for (int d = st.delta_min; d < st.delta_min + st.delta_count; ++d) {
        const std::size_t idx = st.index(i, d);
        if (!st.reachable[idx]) continue;
        for (int j = st.target_lo[idx]; j <= st.target_hi[idx]; ++j) next.reachable[next.index(j, j - i)] = 1;
      }
  }
}

std::size_t DecisionGraph::state_count() const {
  std::size_t n = 0;
  for (const auto& st : stages_) n += static_cast<std::size_t>(std::count(st.reachable.begin(), st.reachable.end(), 1));
  return n;
}

double DecisionGraph::incoming_dip(int k, int node, int delta) const {
  const auto& lat = ctx_.lattice;
  const double dx = ctx_.abscissas[static_cast<std::size_t>(k)] - ctx_.abscissas[static_cast<std::size_t>(k) - 1];
  return dip_degrees(lat.y(node) - lat.y(node - delta), dx);
}

ValueTable solve_realization(const Realization& real, const DecisionGraph& graph, const AgentConfig& cfg,
                             const ScoringConfig& scoring) {
  const int K = graph.stages();
  const int N = graph.nodes();
  const auto& ctx = graph.context();
  const auto& lat = ctx.lattice;
  const double gamma = cfg.discount;

  ValueTable table;
  table.values.resize(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const auto& st = graph.stage(k);
    table.values[static_cast<std::size_t>(k)].assign(st.reachable.size(), cfg.stop_value);
  }

  std::vector<double> seg;
  for (int k = K - 1; k >= 0; --k) {
    const auto& st = graph.stage(k);
    const auto& next = graph.stage(k + 1);
    const auto& next_values = table.values[static_cast<std::size_t>(k) + 1];
    auto& values = table.values[static_cast<std::size_t>(k)];
    const SegmentProfile profile(real, ctx.abscissas[static_cast<std::size_t>(k)],
                                 ctx.abscissas[static_cast<std::size_t>(k) + 1]);
    for (int i = 0; i < N; ++i) {
      const int nlo = st.node_lo[static_cast<std::size_t>(i)];
      const int nhi = st.node_hi[static_cast<std::size_t>(i)];
      if (nlo > nhi) continue;
      const double yi = lat.y(i);
      seg.resize(static_cast<std::size_t>(nhi - nlo + 1));
      for (int j = nlo; j <= nhi; ++j) seg[static_cast<std::size_t>(j - nlo)] = profile.score(yi, lat.y(j), scoring);

      for (int d = st.delta_min; d < st.delta_min + st.delta_count; ++d) {
        const std::size_t idx = st.index(i, d);
        if (!st.reachable[idx]) continue;
        double best = cfg.stop_value;
        const int lo = st.target_lo[idx];
        const int hi = st.target_hi[idx];
        for (int j = lo; j <= hi; ++j) {
          const double q = seg[static_cast<std::size_t>(j - nlo)] + gamma * next_values[next.index(j, j - i)];
          if (k == 0) table.root_q.push_back(q);
          best = std::max(best, q);
        }
        if (k == 0) {
          table.root_lo = lo;
          table.root_hi = hi;
        }
        values[idx] = best;
      }
    }
  }
  table.root_value = K > 0 ? table.values[0][graph.stage(0).index(ctx.bit_node, 0)] : cfg.stop_value;
  return table;
}

namespace {

struct StateRef {
  int k;
  int node;
  int delta;
};

// Alternatives available in one state with their values under the fitted table.
std::vector<Alternative> state_alternatives(const Realization& real, const DecisionGraph& graph,
                                            const ValueTable& table, const AgentConfig& cfg,
                                            const ScoringConfig& scoring, StateRef s) {
  const auto& ctx = graph.context();
  const auto& lat = ctx.lattice;
  const auto& st = graph.stage(s.k);
  std::vector<Alternative> alts;
  alts.push_back({true, -1, 0.0, 0.0, cfg.stop_value});
  if (s.k >= graph.stages()) return alts;
  const std::size_t idx = st.index(s.node, s.delta);
  const double dip = s.k == 0 ? ctx.incoming_dip : graph.incoming_dip(s.k, s.node, s.delta);
  const Point from{ctx.abscissas[static_cast<std::size_t>(s.k)], lat.y(s.node)};
  const double x1 = ctx.abscissas[static_cast<std::size_t>(s.k) + 1];
  for (int j = st.target_lo[idx]; j <= st.target_hi[idx]; ++j) {
    const Point to{x1, lat.y(j)};
    const double q = score_segment(from, to, real, scoring) + cfg.discount * table.value(graph, s.k + 1, j, j - s.node);
    alts.push_back({false, j, to.y, dip_degrees(to.y - from.y, x1 - from.x) - dip, q});
  }
  return alts;
}

}  // namespace

double bellman_residual(const Realization& real, const DecisionGraph& graph, const ValueTable& table,
                        const AgentConfig& cfg, const ScoringConfig& scoring) {
  double worst = 0.0;
  for (int k = 0; k <= graph.stages(); ++k) {
    const auto& st = graph.stage(k);
    for (int i = 0; i < graph.nodes(); ++i)
      for (int d = st.delta_min; d < st.delta_min + st.delta_count; ++d) {
        if (!st.reachable[st.index(i, d)]) continue;
        const auto alts = state_alternatives(real, graph, table, cfg, scoring, {k, i, d});
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& a : alts) best = std::max(best, a.mean_value);
        worst = std::max(worst, std::abs(best - table.value(graph, k, i, d)));
      }
  }
  return worst;
}

std::vector<Point> optimal_path(const Realization& real, const DecisionGraph& graph, const ValueTable& table,
                                const AgentConfig& cfg, const ScoringConfig& scoring) {
  const auto& ctx = graph.context();
  std::vector<Point> path{{ctx.abscissas.front(), ctx.lattice.y(ctx.bit_node)}};
  StateRef s{0, ctx.bit_node, 0};
  while (s.k < graph.stages()) {
    const auto alts = state_alternatives(real, graph, table, cfg, scoring, s);
    const auto& pick = alts[robust_argmax(alts)];
    if (pick.stop) break;
    path.push_back({ctx.abscissas[static_cast<std::size_t>(s.k) + 1], pick.y});
    s = {s.k + 1, pick.node, pick.node - s.node};
  }
  return path;
}

std::size_t robust_argmax(std::span<const Alternative> alternatives) {
  if (alternatives.empty()) throw ValidationError("no alternatives to choose from");
  auto better = [](const Alternative& a, const Alternative& b) {
    if (a.mean_value != b.mean_value) return a.mean_value > b.mean_value;
    if (a.stop != b.stop) return a.stop;
    const double da = std::abs(a.dip_change);
    const double db = std::abs(b.dip_change);
    if (da != db) return da < db;
    return a.y < b.y;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < alternatives.size(); ++i)
    if (better(alternatives[i], alternatives[best])) best = i;
  return best;
}

DecisionReport decide(const Ensemble& ens, const DecisionContext& ctx, const AgentConfig& cfg,
                      const ScoringConfig& scoring) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  if (ens.members.empty()) throw ValidationError("cannot decide on an empty ensemble");
  const DecisionGraph graph(ctx);
  const auto& lat = ctx.lattice;

  DecisionReport report;
  report.alternatives.push_back({true, -1, 0.0, 0.0, cfg.stop_value});
  if (graph.stages() > 0) {
    const auto& root = graph.stage(0);
    const std::size_t ridx = root.index(ctx.bit_node, 0);
    const int lo = root.target_lo[ridx];
    const int hi = root.target_hi[ridx];
    if (lo <= hi) {
      const auto width = static_cast<std::size_t>(hi - lo + 1);
      const std::size_t n = ens.size();
      std::vector<double> q(n * width, 0.0);
      auto solve_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
          const auto table = solve_realization(ens.members[m], graph, cfg, scoring);
          std::copy(table.root_q.begin(), table.root_q.end(), q.begin() + static_cast<std::ptrdiff_t>(m * width));
        }
      };
      unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
      workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
      if (workers <= 1) {
        solve_range(0, n);
      } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(solve_range, b, std::min(n, b + chunk));
      }
      // Member-ordered reduction keeps the means bit-reproducible for any worker count.
      for (std::size_t a = 0; a < width; ++a) {
        double sum = 0.0;
        for (std::size_t m = 0; m < n; ++m) sum += q[m * width + a];
        const int j = lo + static_cast<int>(a);
        const double y = lat.y(j);
        const double x0 = ctx.abscissas[0];
        const double dx = ctx.abscissas[1] - x0;
        const double change = dip_degrees(y - lat.y(ctx.bit_node), dx) - ctx.incoming_dip;
        report.alternatives.push_back({false, j, y, change, sum / static_cast<double>(n)});
      }
    }
  }
  report.chosen = robust_argmax(report.alternatives);
  const auto& pick = report.alternatives[report.chosen];
  report.decision = pick.stop ? Decision::stop() : Decision::go(pick.y);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace gsb
