#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "wishlab/cir.hpp"
#include "wishlab/error.hpp"
#include "wishlab/stats.hpp"

using namespace wishlab;

TEST_CASE("boundary classification") {
  CHECK(cir_boundary_classification({2.0, 0.0, 2.0}) == CirBoundary::never_hits_zero);
  CHECK(cir_boundary_classification({1.0, 1.0, 2.0}) == CirBoundary::hits_zero_as);
  CHECK(cir_boundary_classification({1.0, -1.0, 2.0}) == CirBoundary::hits_zero_prob_in_0_1);
  CHECK_THROWS_AS(cir_boundary_classification({-1.0, 1.0, 2.0}), DomainError);
}

TEST_CASE("sum process coefficients") {
  const CirParams c = sum_process({2.0, 0.5, 1.5, 3});
  CHECK(c.a == 6.0);
  CHECK(c.b == 3.0);
  CHECK(c.sigma == 2.0);
}

TEST_CASE("conditional mean") {
  CHECK(cir_conditional_mean({2.0, 1.0, 2.0}, 1.0, std::log(2.0)) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(cir_conditional_mean({2.0, 0.0, 2.0}, 1.0, 1.0) == doctest::Approx(3.0));
  CHECK(cir_conditional_mean({0.0, 2.0, 2.0}, 5.0, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK(cir_conditional_mean({2.0, 1.0, 2.0}, 1.0, 0.0) == 1.0);
  CHECK_THROWS_AS(cir_conditional_mean({2.0, 0.0, 2.0}, 1.0, std::numeric_limits<double>::infinity()), DomainError);
  // Continuity through b = 0.
  CHECK(cir_conditional_mean({2.0, 1e-12, 2.0}, 1.0, 1.0) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("exact step matches the conditional moments") {
  const CirParams cir{3.0, 2.0, 2.0};
  const double r = 1.5, dt = 0.4;
  std::vector<double> x;
  for (std::uint32_t p = 0; p < 100000; ++p) {
    RandomStream rng(11, p, 0);
    x.push_back(cir_exact_step(cir, r, dt, rng));
  }
  const double m = cir_conditional_mean(cir, r, dt);
  const double v = cir_conditional_variance(cir, r, dt);
  CHECK(std::abs(sample_mean(x) - m) < 5.0 * std::sqrt(v / x.size()));
  CHECK(sample_variance(x) == doctest::Approx(v).epsilon(0.03));
  for (double y : x) REQUIRE(y >= 0.0);
}

TEST_CASE("exact step with low dimension and absorbed state") {
  RandomStream rng(12, 0, 0);
  for (int i = 0; i < 100; ++i) CHECK(cir_exact_step({0.0, 1.0, 2.0}, 0.0, 0.1, rng) == 0.0);
  const CirParams cir{0.3, 0.0, 2.0};
  std::vector<double> x;
  for (std::uint32_t p = 0; p < 50000; ++p) {
    RandomStream s(13, p, 0);
    x.push_back(cir_exact_step(cir, 0.2, 0.5, s));
  }
  const double m = cir_conditional_mean(cir, 0.2, 0.5);
  const double v = cir_conditional_variance(cir, 0.2, 0.5);
  CHECK(std::abs(sample_mean(x) - m) < 5.0 * std::sqrt(v / x.size()));
  CHECK_THROWS_AS(cir_exact_step(cir, -1.0, 0.5, rng), DomainError);
  CHECK_THROWS_AS(cir_exact_step(cir, 1.0, 0.0, rng), DomainError);
}

TEST_CASE("exact step over a long time reaches the invariant Gamma law") {
  const CirParams cir{4.0, 2.0, 2.0};
  const GammaLaw g = cir_invariant_gamma(cir);
  std::vector<double> x;
  for (std::uint32_t p = 0; p < 20000; ++p) {
    RandomStream s(14, p, 0);
    x.push_back(cir_exact_step(cir, 7.0, 20.0, s));
  }
  std::sort(x.begin(), x.end());
  CHECK(ks_test(x, [&](double y) { return gamma_cdf(y, g.shape, g.rate); }).p > 0.001);
}

TEST_CASE("invariant Gamma law") {
  GammaLaw g = cir_invariant_gamma({4.0, 2.0, 2.0});
  CHECK(g.shape == 2.0);
  CHECK(g.rate == 1.0);
  g = cir_invariant_gamma({2.0, 2.0, 2.0});
  CHECK(g.shape == 1.0);
  CHECK(g.rate == 1.0);
  CHECK_THROWS_AS(cir_invariant_gamma({3.0, -1.0, 2.0}), NoInvariantLaw);
  CHECK_THROWS_AS(cir_invariant_gamma({3.0, 0.0, 2.0}), NoInvariantLaw);
}

TEST_CASE("Laplace transform basics") {
  const ModelParams p{1.0, 0.5, 1.0, 2};
  CHECK(integrated_cir_laplace(p, 1.0, 0.0, 1.0).value == 1.0);
  const LaplaceQuery far = integrated_cir_laplace_with_constant(1.0, 1.0, 1.0, 1.0, 1e3);
  CHECK(std::abs(far.psi - 1.0 / (std::sqrt(3.0) + 1.0)) <= 1e-9);
  CHECK(std::isfinite(integrated_cir_laplace(p, 1.0, 1.0, 1e6).psi));
  CHECK_THROWS_AS(integrated_cir_laplace(p, 1.0, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(integrated_cir_laplace(p, 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("Laplace transform is monotone and in (0, 1]") {
  for (double gamma : {0.0, 0.5, 2.0}) {
    const ModelParams p{1.5, 0.5, gamma, 3};
    double prev_mu = 1.0;
    for (double mu : {0.1, 0.5, 1.0, 3.0}) {
      const double v = integrated_cir_laplace(p, 2.0, mu, 1.0).value;
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      CHECK(v < prev_mu);
      prev_mu = v;
    }
    double prev_t = 1.0;
    for (double t : {0.1, 0.5, 1.0, 5.0, 50.0}) {
      const double v = integrated_cir_laplace(p, 2.0, 0.7, t).value;
      CHECK(v < prev_t);
      prev_t = v;
    }
  }
}

TEST_CASE("Laplace transform against exact-subsampled Monte Carlo") {
  const ModelParams p{1.0, 0.5, 1.0, 2};
  const CirParams cir = sum_process(p);
  const std::vector<double> times{1.0};
  std::vector<double> integrals;
  for (std::uint32_t q = 0; q < 100000; ++q) {
    RandomStream rng(15, q, 0);
    integrals.push_back(integrated_cir_sample(cir, 1.0, times, 1.0 / 64.0, rng)[0]);
  }
  const StatSummary mc = empirical_laplace(integrals, 0.5);
  const double closed = integrated_cir_laplace(p, 1.0, 0.5, 1.0).value;
  CHECK(std::abs(mc.estimate - closed) <= 4.0 * mc.stderr_);
}

TEST_CASE("integrated sample of a constant path") {
  RandomStream rng(16, 0, 0);
  const std::vector<double> times{0.5, 1.0};
  const auto v = integrated_cir_sample({0.0, 1.0, 2.0}, 0.0, times, 0.125, rng);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
}
