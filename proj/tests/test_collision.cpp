#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wishlab/collision.hpp"
#include "wishlab/error.hpp"

using namespace wishlab;

namespace {

PathRecord make_path(int n, const std::vector<std::vector<double>>& states, double dt) {
  PathRecord r;
  r.params.n = n;
  for (std::size_t k = 0; k < states.size(); ++k) {
    r.times.push_back(static_cast<double>(k) * dt);
    r.states.insert(r.states.end(), states[k].begin(), states[k].end());
  }
  return r;
}

}  // namespace

TEST_CASE("Bessel dimension of the gap") {
  BesselDimension b = bessel_collision_dimension(0.5);
  CHECK(b.dimension == 1.5);
  CHECK(b.hits_zero);
  b = bessel_collision_dimension(1.0);
  CHECK(b.dimension == 2.0);
  CHECK(b.hits_zero);
  b = bessel_collision_dimension(1.5);
  CHECK(b.dimension == 2.5);
  CHECK_FALSE(b.hits_zero);
  CHECK_THROWS_AS(bessel_collision_dimension(0.0), DomainError);
}

TEST_CASE("event detection on a synthetic path") {
  const PathRecord r = make_path(3, {{1.0, 2.0, 3.0}, {0.5, 0.5005, 3.0}, {0.0005, 0.001, 3.0}, {1.0, 2.0, 3.0}}, 0.1);
  const EventLog log = detect_events(r, 1e-3);
  CHECK(log.has(EventKind::pair_collision, 1));
  CHECK(log.first_time(EventKind::pair_collision, 1) == doctest::Approx(0.1));
  CHECK_FALSE(log.has(EventKind::pair_collision, 2));
  CHECK(log.has(EventKind::zero_hit_partial_sum, 1));
  CHECK(log.has(EventKind::joint_event_zeta));
  CHECK(log.first_time(EventKind::joint_event_zeta) == doctest::Approx(0.2));
  CHECK(log.multiple_observations == 0);
  CHECK(std::isinf(log.first_time(EventKind::multiple_collision)));
}

TEST_CASE("multiple collisions are counted per step") {
  const PathRecord r =
      make_path(3, {{1.0, 2.0, 3.0}, {1.0, 1.0005, 1.0009}, {1.0, 1.0005, 1.0009}, {0.0001, 0.0002, 0.0003}}, 0.1);
  const EventLog log = detect_events(r, 1e-3);
  CHECK(log.multiple_observations == 3);
  CHECK(log.first_time(EventKind::multiple_collision) == doctest::Approx(0.1));
}

TEST_CASE("stop rules end the path") {
  EventDetector d(2, 0.1);
  d.stop_on_pair(1);
  CHECK_FALSE(d.observe(0.0, std::vector<double>{1.0, 2.0}));
  CHECK(d.observe(0.1, std::vector<double>{1.0, 1.05}));
  EventDetector s(3, 0.1);
  s.stop_on_partial_sum(2);
  CHECK_FALSE(s.observe(0.0, std::vector<double>{0.01, 0.2, 1.0}));
  CHECK(s.observe(0.1, std::vector<double>{0.01, 0.05, 1.0}));
}

TEST_CASE("time change") {
  const PathRecord zero = make_path(2, {{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, 0.5);
  const TimeChange z = time_change_A(zero, 2);
  for (const auto& [t, a] : z.grid) CHECK(a == 0.0);
  const PathRecord one = make_path(2, {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}, 0.5);
  const TimeChange tc = time_change_A(one, 2);
  CHECK(tc.grid.back().second == doctest::Approx(4.0));
  CHECK(tc.inverse(2.0) == doctest::Approx(0.5));
  CHECK(std::isinf(tc.inverse(5.0)));
  CHECK_THROWS_AS(time_change_A(one, 1), BadK);
}

TEST_CASE("integrability diagnostic") {
  const PathRecord r = make_path(2, {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}}, 0.5);
  const auto d = integrability_diagnostic(r, 1e-3);
  REQUIRE(d.size() == 1);
  CHECK(d[0] == doctest::Approx(2.0));
}

TEST_CASE("partial sum hits with threshold below two") {
  SimConfig c;
  c.horizon = 50.0;
  c.dt = 2e-3;
  c.paths = 40;
  c.seed = 3;
  const FirstPassageReport rep = first_passage_partial_sum({1.0, 0.4, 0.5, 3}, c, 2);
  CHECK(rep.levels == kDeltaLadder);
  CHECK(rep.hit.size() == 3);
  CHECK(rep.hit[1].estimate >= 0.8);
  CHECK(rep.hit[0].estimate >= rep.hit[1].estimate);
  CHECK(rep.hit[1].estimate >= rep.hit[2].estimate);
  CHECK_THROWS_AS(first_passage_partial_sum({1.0, 0.4, 0.5, 3}, c, 4), BadK);
}
