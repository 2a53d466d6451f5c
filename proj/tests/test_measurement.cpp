#include <doctest.h>

#include <cmath>

#include "gsb/errors.hpp"
#include "gsb/measurement.hpp"
#include "support.hpp"

using namespace gsb;

namespace {
const LateralGrid kGrid(0.0, 10.0, 5);
}

TEST_CASE("noise-free distances are signed and saturated") {
  const auto r = test::flat_realization(kGrid, {10, 13, 20, 23});
  ToolConfig tool;
  const auto ob = observe(r, 15.0, 12.0, tool, false);
  CHECK(ob.x == 15.0);
  CHECK(ob.y == 12.0);
  CHECK(ob.distances[0] == doctest::Approx(-2.0));
  CHECK(ob.distances[1] == doctest::Approx(1.0));
  CHECK(ob.distances[2] == 4.8);
  CHECK(ob.distances[3] == 4.8);
  CHECK(observe(r, 15.0, 30.0, tool, false).distances[0] == -4.8);
  CHECK_THROWS_AS(observe(r, 50.0, 12.0, tool, false), DomainError);
}

TEST_CASE("noisy observations are keyed by call index") {
  const auto r = test::flat_realization(kGrid, {10, 13, 20, 23});
  ToolConfig tool;
  const auto a = observe(r, 15.0, 12.0, tool, true, 7);
  const auto b = observe(r, 15.0, 12.0, tool, true, 7);
  const auto c = observe(r, 15.0, 12.0, tool, true, 8);
  CHECK(a.distances == b.distances);
  CHECK(a.distances != c.distances);
  CHECK(a.distances[2] == 4.8);

  double sum = 0, sq = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const double e = observe(r, 15.0, 12.0, tool, true, static_cast<std::uint64_t>(i)).distances[0] + 2.0;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sd - 0.1) < 0.01);
}

TEST_CASE("noise is applied before saturation") {
  const auto r = test::flat_realization(kGrid, {10, 13, 20, 23});
  ToolConfig tool;
  tool.noise_std = 1.0;
  int saturated = 0;
  for (std::uint64_t i = 0; i < 400; ++i) {
    const double d = observe(r, 15.0, 5.5, tool, true, i).distances[0];  // true distance 4.5
    CHECK(d <= 4.8);
    saturated += d == 4.8;
  }
  CHECK(saturated > 50);
}

TEST_CASE("stand sub-locations are spread evenly and end at the stand") {
  const auto r = test::flat_realization(kGrid, {10, 13, 20, 23});
  ToolConfig tool;
  const auto obs = stand_observations(r, {0.0, 4.5}, {30.0, 6.0}, tool, false);
  REQUIRE(obs.size() == 3);
  CHECK(obs[0].x == 10.0);
  CHECK(obs[1].x == 20.0);
  CHECK(obs[2].x == 30.0);
  CHECK(obs[0].y == doctest::Approx(5.0));
  CHECK(obs[2].y == doctest::Approx(6.0));
  CHECK(obs[2].distances[0] == doctest::Approx(4.0));
  CHECK_THROWS_AS(stand_observations(r, {10, 5}, {10, 6}, tool, false), DomainError);

  const auto n0 = stand_observations(r, {0.0, 8}, {30.0, 8}, tool, true, 0);
  const auto n1 = stand_observations(r, {0.0, 8}, {30.0, 8}, tool, true, 1);
  CHECK(n0[0].distances != n1[0].distances);
  // Stand 1 sub-location 1 shares call index 4 with no sub-location of stand 0.
  CHECK(n1[0].distances == observe(r, 10.0, 8.0, tool, true, 4).distances);
}

TEST_CASE("tool config validation") {
  ToolConfig t;
  t.look_around = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = {};
  t.sub_locations_per_stand = 0;
  CHECK_THROWS_AS(t.validate(), ConfigError);
}
