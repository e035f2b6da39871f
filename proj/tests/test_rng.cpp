#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "wishlab/error.hpp"
#include "wishlab/rng.hpp"
#include "wishlab/stats.hpp"

using namespace wishlab;

TEST_CASE("Philox4x32-10 known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a(42, 3, 1), b(42, 3, 1), c(42, 4, 1), d(42, 3, 2), e(43, 3, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    CHECK(x != d.uniform());
    CHECK(x != e.uniform());
  }
  const RandomStream f = rng_streams(7, 1, 0);
  RandomStream g = f, h(7, 1, 0);
  CHECK(g.normal() == h.normal());
}

TEST_CASE("normal_pair is a pure function") {
  const PhiloxKey k = make_key(9);
  CHECK(normal_pair(k, {1, 2, 3, 4}) == normal_pair(k, {1, 2, 3, 4}));
  CHECK(normal_pair(k, {1, 2, 3, 4}) != normal_pair(k, {2, 2, 3, 4}));
  CHECK(make_key(9) != make_key(10));
}

TEST_CASE("uniforms lie in the open unit interval and are uniform") {
  CHECK(to_unit_open(0) > 0.0);
  CHECK(to_unit_open(~0ULL) < 1.0);
  RandomStream r(1, 0, 0);
  std::vector<double> u;
  for (int i = 0; i < 20000; ++i) u.push_back(r.uniform());
  std::sort(u.begin(), u.end());
  CHECK(u.front() > 0.0);
  CHECK(u.back() < 1.0);
  CHECK(ks_test(u, [](double x) { return x; }).p > 0.001);
}

TEST_CASE("normal variates") {
  RandomStream r(2, 0, 0);
  std::vector<double> z;
  for (int i = 0; i < 20000; ++i) z.push_back(r.normal());
  CHECK(std::abs(sample_mean(z)) < 5.0 / std::sqrt(20000.0));
  CHECK(sample_variance(z) == doctest::Approx(1.0).epsilon(0.04));
  std::sort(z.begin(), z.end());
  CHECK(ks_test(z, normal_cdf).p > 0.001);
}

TEST_CASE("gamma variates") {
  for (double shape : {0.3, 1.0, 2.5, 40.0}) {
    RandomStream r(3, 0, 0);
    std::vector<double> g;
    for (int i = 0; i < 20000; ++i) g.push_back(r.gamma(shape, 2.0));
    std::sort(g.begin(), g.end());
    CHECK(ks_test(g, [&](double x) { return gamma_cdf(x, shape, 2.0); }).p > 0.001);
  }
  RandomStream r(3, 0, 0);
  CHECK_THROWS_AS(r.gamma(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(r.gamma(1.0, -1.0), DomainError);
}

TEST_CASE("poisson variates") {
  for (double mean : {0.0, 0.7, 5.0, 30.0, 400.0}) {
    RandomStream r(4, 0, 0);
    std::vector<double> k;
    for (int i = 0; i < 20000; ++i) k.push_back(static_cast<double>(r.poisson(mean)));
    if (mean == 0.0) {
      CHECK(sample_mean(k) == 0.0);
      continue;
    }
    CHECK(std::abs(sample_mean(k) - mean) < 5.0 * std::sqrt(mean / 20000.0));
    CHECK(sample_variance(k) == doctest::Approx(mean).epsilon(0.06));
  }
  RandomStream r(4, 0, 0);
  CHECK_THROWS_AS(r.poisson(-1.0), DomainError);
}

TEST_CASE("engine satisfies the bit generator interface") {
  PhiloxEngine e(5, 0, 0);
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(e());
  CHECK(seen.size() > 990);
  static_assert(PhiloxEngine::min() == 0);
}
