#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>
#include <unistd.h>

#include "gsb/agents.hpp"
#include "gsb/analysis.hpp"
#include "gsb/errors.hpp"
#include "support.hpp"

using namespace gsb;
namespace fs = std::filesystem;

namespace {

ParticipantResult participant(const std::string& id, std::vector<double> percents, bool sand = true) {
  ParticipantResult p;
  p.participant_id = id;
  for (std::size_t r = 0; r < percents.size(); ++r)
    p.rounds["r" + std::to_string(r + 1)] = {percents[r], percents[r], sand, {}};
  return p;
}

const std::vector<std::string> kRounds{"r1", "r2", "r3"};
const std::map<std::string, std::string> kDigests{{"r1", "aa"}, {"r2", "bb"}, {"r3", "bb"}};

std::vector<Point> path(std::vector<double> ys) {
  std::vector<Point> out;
  for (std::size_t i = 0; i < ys.size(); ++i) out.push_back({30.0 * static_cast<double>(i), ys[i]});
  return out;
}

}  // namespace

TEST_CASE("simple ranking by mean percent") {
  const auto r = simple_ranking({participant("a", {92, 50, 50}), participant("b", {70, 70, 60})}, kRounds);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].participant_id == "b");
  CHECK(r.rows[1].mean_percent == doctest::Approx(64.0));
  CHECK(r.rows[0].label == "HP-01");
  CHECK(r.rows[1].label == "HP-02");

  const auto tied = simple_ranking({participant("x", {50, 50, 50}), participant("y", {50, 50, 50})}, kRounds);
  CHECK(tied.rows[0].participant_id == "x");
  CHECK(tied.rows[0].tied);
  CHECK(tied.rows[1].tied);

  const auto perfect = simple_ranking({participant("p", {100, 100, 100}), participant("q", {99, 100, 100})}, kRounds);
  CHECK(perfect.rows[0].participant_id == "p");
  CHECK(perfect.rows[0].mean_percent == 100.0);

  auto missing = participant("m", {80, 80});
  const auto ex = simple_ranking({missing, participant("a", {1, 1, 1})}, kRounds);
  CHECK(ex.rows.size() == 1);
  REQUIRE(ex.excluded.size() == 1);
  CHECK(ex.excluded[0].participant_id == "m");
}

TEST_CASE("qualification requires all rounds and one sand") {
  auto flagged = participant("f", {90, 90, 90});
  flagged.manually_excluded = true;
  const auto q = qualify({participant("ok", {10, 10, 10}), participant("dry", {0, 0, 0}, false),
                          participant("short", {10, 10}), flagged},
                         kRounds);
  REQUIRE(q.qualified.size() == 1);
  CHECK(q.qualified[0].participant_id == "ok");
  CHECK(q.excluded.size() == 3);
}

TEST_CASE("descending ranks average ties") {
  const auto r = descending_ranks({5, 9, 5, 1});
  CHECK(r == std::vector<double>{2.5, 1, 2.5, 4});
}

TEST_CASE("comparative ranking pools the identical rounds") {
  const auto rows = comparative_ranking({participant("a", {10, 99, 98}), participant("b", {90, 20, 30})}, "r1",
                                        {"r2", "r3"}, kDigests);
  const auto& a = rows[0].participant_id == "a" ? rows[0] : rows[1];
  CHECK(a.rank_star[0] == 0.5);
  CHECK(a.rank_star[1] == 1.0);
  CHECK(a.single_rank == 2.0);

  std::vector<ParticipantResult> many;
  for (int i = 0; i < 30; ++i) many.push_back(participant("p" + std::to_string(i), {double(i), double(i), double(i) + 0.5}));
  double worst = 0;
  for (const auto& row : comparative_ranking(many, "r1", {"r2", "r3"}, kDigests))
    worst = std::max({worst, row.rank_star[0], row.rank_star[1]});
  CHECK(worst == 30.0);

  CHECK_THROWS_AS(comparative_ranking(many, "r2", {"r1", "r3"}, kDigests), ValidationError);
  CHECK_THROWS_AS(comparative_ranking(many, "r1", {"r2", "r2"}, kDigests), ValidationError);
}

TEST_CASE("comparative ranking is invariant under affine rescaling") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20, 100);
  std::vector<ParticipantResult> base, scaled;
  for (int i = 0; i < 15; ++i) {
    const std::vector<double> p{std::round(u(rng)), std::round(u(rng)), std::round(u(rng))};
    base.push_back(participant("p" + std::to_string(i), p));
    scaled.push_back(participant("p" + std::to_string(i), {3 * p[0] + 7, 3 * p[1] + 7, 3 * p[2] + 7}));
  }
  const auto a = comparative_ranking(base, "r1", {"r2", "r3"}, kDigests);
  const auto b = comparative_ranking(scaled, "r1", {"r2", "r3"}, kDigests);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].participant_id == b[i].participant_id);
    CHECK(a[i].rank_star == b[i].rank_star);
  }
}

TEST_CASE("the agent beaten at most once by everyone tops the comparative order") {
  // "star" wins round 2 and 3 pairwise against everyone except single-round heroes.
  std::vector<ParticipantResult> field{participant("hero", {92, 40, 45}), participant("star", {70, 80, 80}),
                                       participant("steady", {75, 60, 62}), participant("late", {30, 85, 20}),
                                       participant("low", {20, 30, 35})};
  const auto rows = comparative_ranking(field, "r1", {"r2", "r3"}, kDigests);
  CHECK(rows[0].participant_id == "star");
  CHECK(rows[0].pairwise_losses == 0);
  const auto simple = simple_ranking(
      {participant("hero", {92, 75, 75}), participant("star", {70, 80, 80})}, kRounds);
  CHECK(simple.rows[0].participant_id == "hero");
}

TEST_CASE("trajectory distance") {
  const auto t = path({4.5, 5, 6, 7, 8});
  CHECK(trajectory_distance(t, t, 7.25) == 0.0);
  const auto shifted = path({4.5, 5.3, 6.3, 7.3, 8.3});
  CHECK(trajectory_distance(t, shifted, 7.25) == doctest::Approx(0.3));
  const auto early = path({4.5, 5, 6});
  CHECK(trajectory_distance(t, early, 7.25) == doctest::Approx(7.25 * 2 / 4));
  CHECK(trajectory_distance(path({4.5}), path({4.5}), 7.25) == 0.0);
  auto other = t;
  other[2].x = 61;
  CHECK_THROWS_AS(trajectory_distance(t, other, 1.0), ValidationError);
  CHECK(missing_point_penalty(YLattice(4.5, 0.25, -10, 117)) == 14.5);
}

TEST_CASE("trajectory distance is a pseudometric on random triples") {
  const YLattice lat(4.5, 0.25, -10, 117);
  const double penalty = missing_point_penalty(lat);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 15), node(0, 116);
  auto random_path = [&] {
    std::vector<double> ys{4.5};
    const int n = len(rng);
    for (int i = 1; i < n; ++i) ys.push_back(lat.y(node(rng)));
    return path(ys);
  };
  for (int trial = 0; trial < 3000; ++trial) {
    const auto a = random_path(), b = random_path(), c = random_path();
    const double ab = trajectory_distance(a, b, penalty);
    CHECK(ab == trajectory_distance(b, a, penalty));
    CHECK(ab >= 0.0);
    CHECK(trajectory_distance(a, c, penalty) <= ab + trajectory_distance(b, c, penalty) + 1e-9);
  }
}

TEST_CASE("consistency classes") {
  CHECK(classify_consistency({3.0, 4.0, 0.0}) == ConsistencyClass::absolutely_consistent);
  CHECK(classify_consistency({6.0, 7.0, 0.4}) == ConsistencyClass::consistent);
  CHECK(classify_consistency({5.0, 5.0, 1.0}, 1.5) == ConsistencyClass::relatively_consistent);
  CHECK(classify_consistency({5.0, 5.0, 1.0}) == ConsistencyClass::relatively_consistent);
  CHECK(classify_consistency({2.0, 2.5, 1.5}) == ConsistencyClass::other);
  CHECK(pair_distance_std({1, 1, 1}) == 0.0);
  CHECK(pair_distance_std({5, 5, 2}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(to_string(ConsistencyClass::relatively_consistent) == "relatively_consistent");
}

TEST_CASE("random guessing baseline") {
  CHECK(random_guess_baseline(30, 3) == 3.75);
  CHECK(random_guess_baseline(30, 1) == 15.0);
  CHECK(random_guess_baseline(0, 3) == 0.0);
  CHECK_THROWS_AS(random_guess_baseline(-1, 3), ValidationError);
}

TEST_CASE("playback verifies logs and pinpoints tampering") {
  const auto dir = fs::temp_directory_path() / ("gsb_playback_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto cfg = EpisodeConfig::defaults();
  cfg.ensemble_size = 10;
  cfg.max_decisions = 4;
  const Engine engine(cfg);
  {
    EpisodeLogWriter log(dir / "a.jsonl");
    DssAgent dss({0.9, 0.0, 1}, cfg.scoring);
    RandomAgent random(3);
    run_episode(engine, dss, &log, {"g", "dss", "r1"});
    run_episode(engine, random, &log, {"x", "random", "r1"});
  }
  const auto replayed = playback(dir / "a.jsonl");
  REQUIRE(replayed.size() == 2);
  CHECK(replayed[0].complete);
  CHECK(replayed[0].optimal.size() >= 1);

  std::ostringstream csv;
  write_overlay_csv(csv, replayed);
  CHECK(csv.str().rfind("episode_id,participant_id,round_id,series,index,x,y\n", 0) == 0);

  auto logs = read_episode_log(dir / "a.jsonl");
  REQUIRE(logs[0].decisions.size() >= 2);
  const auto y = logs[0].decisions[1].decision;
  logs[0].decisions[1].decision = y.is_stop() ? Decision::go(4.5) : Decision::go(y.y + 0.25);
  try {
    playback(logs, "a.jsonl");
    FAIL("tampering not detected");
  } catch (const IntegrityError& e) {
    const std::string what = e.what();
    CHECK(what.find("episode g") != std::string::npos);
    CHECK(what.find("step 1") != std::string::npos);
  }
  logs = read_episode_log(dir / "a.jsonl");
  logs[1].final->score += 1e-9;
  CHECK_THROWS_AS(playback(logs), IntegrityError);

  std::ofstream(dir / "empty.jsonl").close();
  CHECK(playback(dir / "empty.jsonl").empty());

  const auto set = collect_results(dir);
  CHECK(set.participants.size() == 2);
  CHECK(set.round_ids == std::vector<std::string>{"r1"});
  fs::remove_all(dir);
}
