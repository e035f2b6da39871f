#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "wishlab/error.hpp"
#include "wishlab/integrators.hpp"
#include "wishlab/stats.hpp"

using namespace wishlab;

namespace {

NoiseIncrement zero_noise(int n) { return {std::vector<double>(n, 0.0)}; }

bool sorted_nonnegative(const PathRecord& r) {
  for (std::size_t k = 0; k < r.size(); ++k) {
    const auto s = r.state(k);
    if (!std::is_sorted(s.begin(), s.end()) || s[0] < 0.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("scheme names") {
  for (Scheme s : {Scheme::truncated_euler, Scheme::regularized_switching, Scheme::root_coordinates, Scheme::c_epsilon})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);
  try {
    parse_scheme("rk4");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "scheme");
  }
}

TEST_CASE("config defaults and validation") {
  SimConfig c;
  CHECK(c.eps() == doctest::Approx(10.0 * std::sqrt(1e-3)));
  CHECK(interaction_guard(c) == doctest::Approx(std::sqrt(1e-3)));
  c.guard = 1e-6;
  CHECK(interaction_guard(c) == 1e-6);
  CHECK(c.steps() == 1000);
  CHECK(c.start(3) == std::vector<double>{1.0, 2.0, 3.0});
  c.dt = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.paths = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.collision_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.initial = {2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("regularized drifts against the symbolic oracle") {
  const auto a = drift_A_eps({1.0, 0.5, 0.0, 2}, 0.04, std::vector<double>{0.01, 1.0});
  CHECK(a[0] == doctest::Approx(1.0756854275258948).epsilon(1e-14));
  CHECK(a[1] == doctest::Approx(1.5101010101010101).epsilon(1e-14));
  const auto b = drift_B_eps({1.0, 0.3, 0.5, 3}, 0.1, std::vector<double>{0.05, 0.5, 1.0});
  CHECK(b[0] == doctest::Approx(0.25175438596491228).epsilon(1e-14));
  CHECK(b[1] == doctest::Approx(-0.033333333333333333).epsilon(1e-13));
  CHECK(b[2] == doctest::Approx(1.2315789473684211).epsilon(1e-14));
}

TEST_CASE("regularization is inactive away from the boundary") {
  const ModelParams p{2.0, 0.5, 0.3, 3};
  const std::vector<double> l{1.0, 2.5, 4.0};
  const auto exact = drift_lambda(p, l);
  const auto a = drift_A_eps(p, 0.01, l);
  for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(exact[i]).epsilon(1e-12));
}

TEST_CASE("truncated Euler hand step") {
  const ModelParams p{2.0, 0.5, 0.0, 2};
  const EigenState s{0.0, {1.0, 3.0}};
  const EigenState next = step_truncated_euler(p, SimConfig{}, s, 0.01, zero_noise(2));
  CHECK(next.lambda[0] == doctest::Approx(1.01).epsilon(1e-14));
  CHECK(next.lambda[1] == doctest::Approx(3.03).epsilon(1e-14));
  CHECK(next.t == doctest::Approx(0.01));
  const EigenState same = step_truncated_euler(p, SimConfig{}, s, 0.0, zero_noise(2));
  CHECK(same.lambda == s.lambda);
}

TEST_CASE("C_eps hand step") {
  const ModelParams p{0.4, 0.5, 0.0, 2};
  SimConfig c;
  c.scheme = Scheme::c_epsilon;
  c.epsilon = 0.01;
  const RootState next = step_c_epsilon(p, c, RootState{0.0, {1.0, 2.0}}, 0.01, zero_noise(2));
  // Drifts -0.55 - 1/6 and -0.275 + 1/3.
  CHECK(next.x[0] == doctest::Approx(0.99283333333333333).epsilon(1e-14));
  CHECK(next.x[1] == doctest::Approx(2.0005833333333333).epsilon(1e-14));
}

TEST_CASE("root step agrees with the root drift away from collisions") {
  const ModelParams p{2.0, 0.5, 1.0, 2};
  const std::vector<double> x{1.0, 2.0};
  const RootState next = step_root(p, SimConfig{}, RootState{0.0, x}, 0.01, zero_noise(2));
  const auto b = drift_root(p, x);
  CHECK(next.x[0] == doctest::Approx(1.0 + 0.01 * b[0]).epsilon(1e-14));
  CHECK(next.x[1] == doctest::Approx(2.0 + 0.01 * b[1]).epsilon(1e-14));
}

TEST_CASE("switching changes mode at the thresholds") {
  const ModelParams p{1.0, 0.5, 0.0, 2};
  SimConfig c;
  c.epsilon = 0.04;
  auto [s1, m1] = step_switching(p, c, EigenState{0.0, {0.01, 1.0}}, SwitchingMode{}, 1e-6, zero_noise(2));
  CHECK(m1.mode == Mode::B_eps);
  CHECK(m1.switch_times.size() == 1);
  auto [s2, m2] = step_switching(p, c, EigenState{0.0, {0.05, 1.0}}, m1, 1e-6, zero_noise(2));
  CHECK(m2.mode == Mode::A_eps);
  auto [s3, m3] = step_switching(p, c, EigenState{0.0, {0.03, 1.0}}, SwitchingMode{}, 1e-6, zero_noise(2));
  CHECK(m3.mode == Mode::A_eps);
}

TEST_CASE("noise tree refines consistently") {
  const double h = 1e-3;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const NoiseIncrement coarse = noise_increment(9, 4, s, 2.0 * h, 3, 2);
    const NoiseIncrement f0 = noise_increment(9, 4, 2 * s, h, 3, 1);
    const NoiseIncrement f1 = noise_increment(9, 4, 2 * s + 1, h, 3, 1);
    for (int i = 0; i < 3; ++i) CHECK(coarse.dW[i] == doctest::Approx(f0.dW[i] + f1.dW[i]).epsilon(1e-12));
  }
}

TEST_CASE("simulate_path is deterministic and ordered for every scheme") {
  const ModelParams p{2.0, 0.5, 0.5, 3};
  for (Scheme s : {Scheme::truncated_euler, Scheme::regularized_switching, Scheme::root_coordinates}) {
    SimConfig c;
    c.scheme = s;
    c.seed = 17;
    const PathResult a = simulate_path(p, c, 3), b = simulate_path(p, c, 3), other = simulate_path(p, c, 4);
    CHECK(a.record.states == b.record.states);
    CHECK(a.record.states != other.record.states);
    CHECK(sorted_nonnegative(a.record));
    CHECK(a.record.times.front() == 0.0);
    if (a.record.terminated == Termination::horizon) CHECK(a.record.size() == 1001);
  }
  const ModelParams q{0.4, 0.5, 0.0, 2};
  SimConfig c;
  c.scheme = Scheme::c_epsilon;
  c.epsilon = 1e-3;
  CHECK(sorted_nonnegative(simulate_path(q, c, 0).record));
}

TEST_CASE("record stride keeps the endpoints") {
  SimConfig c;
  c.horizon = 1.0;
  c.dt = 0.003;
  c.record_stride = 100;
  const PathResult r = simulate_path({2.0, 0.5, 0.0, 2}, c, 0);
  CHECK(r.record.final_time() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.record.size() == 5);
}

TEST_CASE("c_epsilon requires kappa < 0") {
  SimConfig c;
  c.scheme = Scheme::c_epsilon;
  CHECK_THROWS_AS(simulate_path({2.0, 0.5, 0.0, 2}, c, 0), RegimeMismatch);
}

TEST_CASE("c_epsilon stops at S_eps") {
  SimConfig c;
  c.scheme = Scheme::c_epsilon;
  c.epsilon = 1e-2;
  c.horizon = 50.0;
  c.dt = 1e-2;
  int stopped = 0;
  for (int p = 0; p < 20; ++p) {
    const PathResult r = simulate_path({0.4, 0.5, 0.0, 2}, c, p);
    if (r.record.terminated == Termination::stopped_at_S_eps) {
      ++stopped;
      CHECK(r.record.final_state()[0] <= c.epsilon);
      CHECK(r.events.has(EventKind::stop_S));
    }
  }
  CHECK(stopped >= 18);
}

TEST_CASE("coupling a system with itself gives identical paths") {
  SimConfig c;
  c.seed = 5;
  const ModelParams p{2.0, 0.4, 1.0, 3};
  const auto [a, b] = simulate_coupled(p, p, c, 2);
  CHECK(a.states == b.states);
  const auto [x, y] = simulate_coupled(p, p, c, 2, std::vector<double>{1.5, 1.8, 3.4});
  double first = 0.0, last = 0.0;
  for (int i = 0; i < 3; ++i) {
    first += std::abs(x.state(0)[i] - y.state(0)[i]);
    last += std::abs(x.final_state()[i] - y.final_state()[i]);
  }
  CHECK(last < first);
}

TEST_CASE("truncated Euler sum has the CIR mean") {
  const ModelParams p{2.0, 0.4, 1.0, 3};
  SimConfig c;
  c.seed = 8;
  c.initial = {1.0, 2.0, 3.0};
  c.record_stride = 1000;
  std::vector<double> sums;
  for (int k = 0; k < 2000; ++k) {
    const auto s = simulate_path(p, c, k).record.final_state();
    sums.push_back(s[0] + s[1] + s[2]);
  }
  const double mean = cir_conditional_mean(sum_process(p), 6.0, 1.0);
  const StatSummary m = mean_summary("sum", sums);
  CHECK(std::abs(m.estimate - mean) < 5.0 * m.stderr_);
}

TEST_CASE("implicit CIR scheme keeps the coupling ordered") {
  SimConfig c;
  c.horizon = 2.0;
  for (int p = 0; p < 50; ++p) {
    const auto hi = simulate_cir_path({2.0, 1.0, 2.0}, 0.3, c, p);
    const auto lo = simulate_cir_path({1.2, 1.0, 2.0}, 0.3, c, p);
    REQUIRE(hi.size() == lo.size());
    for (std::size_t k = 0; k < hi.size(); ++k) REQUIRE(hi[k] >= lo[k]);
  }
  CHECK_THROWS_AS(simulate_cir_path({0.5, 1.0, 2.0}, 0.3, c, 0), DomainError);
}

TEST_CASE("parallel runs are ordered by path index") {
  const auto v = run_paths<long long>(1000, 4, [](long long p) { return p * p; });
  for (long long p = 0; p < 1000; ++p) CHECK(v[static_cast<std::size_t>(p)] == p * p);
  CHECK_THROWS_AS(parallel_for(10, 2, [](long long p) {
                    if (p == 7) throw NumericalFailure("boom");
                  }),
                  NumericalFailure);
}
