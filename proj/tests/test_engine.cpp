#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsb/engine.hpp"
#include "gsb/errors.hpp"
#include "support.hpp"

using namespace gsb;

namespace {

EpisodeConfig small_config() {
  auto cfg = EpisodeConfig::defaults();
  cfg.ensemble_size = 12;
  cfg.max_decisions = 5;
  return cfg;
}

}  // namespace

TEST_CASE("default episode geometry") {
  const auto cfg = EpisodeConfig::defaults();
  CHECK(cfg.start.x == 0.0);
  CHECK(cfg.start.y == 4.5);
  const Engine engine(cfg);
  CHECK(engine.abscissas().size() == 15);
  CHECK(engine.abscissas().back() == 420.0);
  CHECK(engine.grid().size() == 43);
  CHECK(engine.lattice().y_min() == 2.0);
  CHECK(engine.lattice().y_max() == 31.0);
  CHECK(engine.lattice().count() == 117);
  CHECK(engine.lattice().index_of(4.5).has_value());
}

TEST_CASE("legal moves follow the dog-leg cone") {
  const Engine engine(small_config());
  const auto s = engine.new_episode();
  const auto moves = engine.legal_moves(s);
  REQUIRE(moves.size() == 10);  // stop plus 30 tan 2 deg = 1.05 m -> 4 nodes each side
  CHECK(moves[0].is_stop());
  CHECK(moves[1].y == 3.5);
  CHECK(moves.back().y == 5.5);
  for (std::size_t i = 1; i < moves.size(); ++i) CHECK(std::abs(std::atan(std::abs(moves[i].y - 4.5) / 30) * 180 / std::numbers::pi) <= 2.0);
}

TEST_CASE("commit advances one stand and updates the ensemble") {
  const Engine engine(small_config());
  const auto s0 = engine.new_episode();
  const auto s1 = engine.commit(s0, Decision::go(5.5));
  CHECK(s0.drilled.points.size() == 1);
  CHECK(s0.ensemble.generation == 0);
  CHECK(s1.drilled.points.size() == 2);
  CHECK(s1.drilled.points[1] == Point{30.0, 5.5});
  CHECK(s1.ensemble.generation == 1);
  CHECK(s1.decisions_taken == 1);
  CHECK(s1.current_dip == doctest::Approx(std::atan2(1.0, 30.0) * 180 / std::numbers::pi));
  CHECK_FALSE(s1.finished);
  CHECK(engine.commit(s0, Decision::go(5.5000000001)).drilled.points[1].y == 5.5);
  const auto moves = engine.legal_moves(s1);
  CHECK(moves.back().y == 7.5);  // 30 tan(1.91 + 2 deg) = 2.05 m
  CHECK(moves[1].y == 5.5);
}

TEST_CASE("illegal continues name the violated bound") {
  const Engine engine(small_config());
  const auto s = engine.new_episode();
  const auto bound_of = [&](double y) {
    try {
      engine.commit(s, Decision::go(y));
    } catch (const ConstraintViolation& e) {
      return e.bound();
    }
    return std::string("none");
  };
  CHECK(bound_of(5.75) == "dogleg");
  CHECK(bound_of(5.1) == "lattice");
  CHECK(bound_of(50.0) == "lattice_bounds");
  CHECK(bound_of(NAN) == "lattice");
  CHECK(bound_of(5.5) == "none");
}

TEST_CASE("stop and exhaustion finish the episode") {
  auto cfg = small_config();
  const Engine engine(cfg);
  const auto s0 = engine.new_episode();
  const auto stopped = engine.commit(s0, Decision::stop());
  CHECK(stopped.finished);
  CHECK(stopped.drilled.stopped_early);
  REQUIRE(stopped.final_result.has_value());
  CHECK(stopped.final_result->score == 0.0);
  CHECK(stopped.ensemble.generation == 0);
  CHECK_THROWS_AS(engine.commit(stopped, Decision::stop()), StateError);
  CHECK_THROWS_AS(engine.legal_moves(stopped), StateError);

  auto s = s0;
  for (int k = 0; k < cfg.max_decisions; ++k) s = engine.commit(s, Decision::go(4.5));
  CHECK(s.finished);
  CHECK_FALSE(s.drilled.stopped_early);
  CHECK(s.final_result->score == doctest::Approx(score_trajectory(s.drilled, s.truth, cfg.scoring)));
  CHECK(s.ensemble.generation == cfg.max_decisions);
}

TEST_CASE("max decisions leaves only stop") {
  auto cfg = small_config();
  cfg.max_decisions = 1;
  const Engine engine(cfg);
  auto s = engine.new_episode();
  s.decisions_taken = 1;
  const auto moves = engine.legal_moves(s);
  REQUIRE(moves.size() == 1);
  CHECK(moves[0].is_stop());
  try {
    engine.commit(s, Decision::go(4.5));
    FAIL("expected violation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.bound() == "max_decisions");
  }
}

TEST_CASE("truth-optimal plan is feasible and not worse than any legal path we try") {
  const Engine engine(small_config());
  const auto s = engine.new_episode();
  const auto plan = engine.optimal_on_truth(s.truth);
  CHECK(plan.score >= 0.0);
  CHECK(plan.score == score_trajectory(plan.trajectory, s.truth, engine.config().scoring));
  auto st = s;
  for (std::size_t k = 1; k < plan.trajectory.points.size(); ++k) st = engine.commit(st, Decision::go(plan.trajectory.points[k].y));
  CHECK(plan.score == score_trajectory(st.drilled, s.truth, engine.config().scoring));
  auto flat = s;
  while (!flat.finished) flat = engine.commit(flat, Decision::go(4.5));
  CHECK(flat.final_result->score <= plan.score);
  CHECK(flat.final_result->optimal_score == plan.score);
}

TEST_CASE("percent of optimal") {
  CHECK(percent_of_optimal(50, 200) == 25.0);
  CHECK(percent_of_optimal(-10, 200) == -5.0);
  CHECK(percent_of_optimal(0, 0) == 100.0);
  CHECK(percent_of_optimal(-1, 0) == 0.0);
}

TEST_CASE("episodes are reproducible") {
  const Engine a(small_config());
  const Engine b(small_config());
  auto sa = a.new_episode();
  auto sb = b.new_episode();
  CHECK(sa.ensemble == sb.ensemble);
  CHECK(sa.truth == sb.truth);
  sa = a.commit(sa, Decision::go(5.0));
  sb = b.commit(sb, Decision::go(5.0));
  CHECK(sa.ensemble == sb.ensemble);
  auto other_cfg = small_config();
  other_cfg.truth_seed = 99;
  const Engine c(other_cfg);
  const auto sc = c.new_episode();
  CHECK(sc.ensemble == b.new_episode().ensemble);
  CHECK_FALSE(sc.truth == sb.truth);
}

TEST_CASE("decision context mirrors the state") {
  const Engine engine(small_config());
  auto s = engine.commit(engine.new_episode(), Decision::go(5.0));
  const auto ctx = engine.decision_context(s);
  CHECK(ctx.abscissas.front() == 30.0);
  CHECK(ctx.abscissas.size() == 5);
  CHECK(ctx.lattice.y(ctx.bit_node) == 5.0);
  CHECK(ctx.incoming_dip == s.current_dip);
}

TEST_CASE("episode config validation") {
  auto cfg = EpisodeConfig::defaults();
  cfg.enkf.obs_error_std = 0.2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = EpisodeConfig::defaults();
  cfg.max_decisions = 0;
  CHECK_THROWS_AS(Engine{cfg}, ConfigError);
  cfg = EpisodeConfig::defaults();
  cfg.ensemble_size = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
