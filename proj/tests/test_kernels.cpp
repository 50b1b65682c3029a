#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "treechain/kernels.hpp"
#include "treechain/stats.hpp"

using namespace treechain;

namespace {

KernelFamily donsker_rademacher(std::uint64_t n) {
  return KernelFamily::donsker(IncrementLaw::rademacher(), n);
}

KernelFamily donsker_gaussian(std::uint64_t n) {
  return KernelFamily::donsker(IncrementLaw::gaussian(1.0), n);
}

}  // namespace

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS((void)KernelFamily::donsker(IncrementLaw::point_mass(1.0), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)KernelFamily::donsker(IncrementLaw::gaussian(2.0), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)KernelFamily::poisson(1.0, 2), std::invalid_argument);
  CHECK_NOTHROW((void)KernelFamily::poisson(1.0, 3));
  CHECK_THROWS_AS((void)KernelFamily::custom({{0.0, 1.0, 0.7}}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)KernelFamily::custom({}, 1), std::invalid_argument);
  // a mean-0 variance-1 table is a legal donsker increment
  CHECK_NOTHROW((void)KernelFamily::donsker(
      IncrementLaw::from_table({{-2.0, 0.125}, {0.0, 0.75}, {2.0, 0.125}}), 4));
}

TEST_CASE("sample_children: donsker rademacher n=1 at x=0") {
  const auto kernel = donsker_rademacher(1);
  rng::Stream s(5);
  int plus_first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto [c0, c1] = kernel.sample_children(0.0, s);
    const bool pm = (c0 == 1.0 && c1 == -1.0);
    const bool mp = (c0 == -1.0 && c1 == 1.0);
    REQUIRE((pm || mp));
    plus_first += pm;
  }
  CHECK(std::fabs(plus_first - n / 2.0) < 4.0 * std::sqrt(n / 4.0));
}

TEST_CASE("sample_children: poisson left child equals the parent, children >= parent") {
  const auto kernel = KernelFamily::poisson(1.0, 8);
  rng::Stream s(6);
  for (int i = 0; i < 20000; ++i) {
    const auto [c0, c1] = kernel.sample_children(3.0, s);
    REQUIRE(c0 == 3.0);
    REQUIRE(c1 >= 3.0);
  }
  CHECK_THROWS_AS((void)kernel.sample_children(-1.0, s), std::domain_error);
  CHECK_THROWS_AS((void)kernel.sample_children(0.5, s), std::domain_error);
}

TEST_CASE("sample_children: symmetric product of point masses is deterministic") {
  const auto kernel =
      KernelFamily::symmetric_product(IncrementLaw::point_mass(0.5), 1);
  rng::Stream s(7);
  for (int i = 0; i < 100; ++i) {
    const auto [c0, c1] = kernel.sample_children(2.0, s);
    REQUIRE(c0 == 2.5);
    REQUIRE(c1 == 2.5);
  }
}

TEST_CASE("antithetic identity: children sum to 2x exactly") {
  rng::Stream s(8);
  SUBCASE("x = 0, any scale") {
    for (std::uint64_t n : {1ull, 2ull, 3ull, 7ull, 100ull}) {
      const auto kernel = donsker_gaussian(n);
      for (int i = 0; i < 1000; ++i) {
        const auto [c0, c1] = kernel.sample_children(0.0, s);
        REQUIRE(c0 + c1 == 0.0);
      }
    }
  }
  SUBCASE("dyadic scales at generic x") {
    for (std::uint64_t n : {1ull, 4ull, 16ull}) {
      const auto kernel = donsker_rademacher(n);
      for (int i = 0; i < 1000; ++i) {
        const auto [c0, c1] = kernel.sample_children(0.75, s);
        REQUIRE(c0 + c1 == 1.5);
      }
    }
  }
}

TEST_CASE("sample_walk_step: donsker rademacher n=1 gives +-1 evenly") {
  const auto kernel = donsker_rademacher(1);
  rng::Stream s(9);
  int plus = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = kernel.sample_walk_step(0.0, s);
    REQUIRE((v == 1.0 || v == -1.0));
    plus += v == 1.0;
  }
  CHECK(std::fabs(plus - n / 2.0) < 4.0 * std::sqrt(n / 4.0));
}

TEST_CASE("sample_walk_step: poisson jumps with probability lambda/n") {
  const auto kernel = KernelFamily::poisson(1.0, 8);
  rng::Stream s(10);
  int jumps = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) jumps += kernel.sample_walk_step(0.0, s) > 0.0;
  const double p = 1.0 / 8.0;
  CHECK(std::fabs(jumps - n * p) < 4.0 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("sample_walk_step: degenerate symmetric kernel stays put") {
  const auto kernel =
      KernelFamily::symmetric_product(IncrementLaw::point_mass(0.0), 1);
  rng::Stream s(11);
  for (int i = 0; i < 100; ++i) REQUIRE(kernel.sample_walk_step(1.25, s) == 1.25);
}

TEST_CASE("marginal consistency: walk step law = half-half mixture of child laws") {
  rng::Stream s(12);
  const int n = 100000;
  SUBCASE("donsker gaussian, two-sample KS") {
    const auto kernel = donsker_gaussian(4);
    std::vector<double> walk(n), mix(n);
    for (int i = 0; i < n; ++i) walk[i] = kernel.sample_walk_step(0.0, s);
    for (int i = 0; i < n; ++i) {
      const auto [c0, c1] = kernel.sample_children(0.0, s);
      mix[i] = (i % 2 == 0) ? c0 : c1;
    }
    const double d = testsupport::two_sample_ks(walk, mix);
    CHECK(d < testsupport::two_sample_ks_critical(n, n, 0.01));
  }
  SUBCASE("poisson, jump frequencies") {
    const auto kernel = KernelFamily::poisson(1.0, 8);
    std::uint64_t walk_counts[2] = {0, 0}, mix_counts[2] = {0, 0};
    for (int i = 0; i < n; ++i)
      ++walk_counts[kernel.sample_walk_step(0.0, s) > 0.0];
    for (int i = 0; i < n; ++i) {
      const auto [c0, c1] = kernel.sample_children(0.0, s);
      ++mix_counts[((i % 2 == 0) ? c0 : c1) > 0.0];
    }
    // two-proportion z-test at ~4 sigma
    const double p1 = static_cast<double>(walk_counts[1]) / n;
    const double p2 = static_cast<double>(mix_counts[1]) / n;
    const double pooled = 0.5 * (p1 + p2);
    const double se = std::sqrt(2.0 * pooled * (1.0 - pooled) / n);
    CHECK(std::fabs(p1 - p2) < 4.0 * se);
  }
}

TEST_CASE("walk_step_expectation closed forms") {
  SUBCASE("donsker rademacher, phi = x^2, x = 0, n = 4 -> 0.25") {
    const auto e =
        donsker_rademacher(4).walk_step_expectation(TestFunction::square(), 0.0);
    CHECK(e.exact);
    CHECK(e.value == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("poisson lambda=1 n=10, phi = identity, x = 0 -> 0.1") {
    const auto e = KernelFamily::poisson(1.0, 10).walk_step_expectation(
        TestFunction::identity(), 0.0);
    CHECK(e.exact);
    CHECK(e.value == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("constant phi integrates to itself for every family") {
    const auto phi = TestFunction::constant(3.25);
    CHECK(donsker_rademacher(8).walk_step_expectation(phi, 1.0).value == 3.25);
    CHECK(donsker_gaussian(8).walk_step_expectation(phi, 1.0).value == 3.25);
    CHECK(KernelFamily::poisson(1.0, 8).walk_step_expectation(phi, 2.0).value == 3.25);
  }
}

TEST_CASE("exact mode matches Monte Carlo within 4 SE on 1e5 draws") {
  struct Case {
    KernelFamily kernel;
    TestFunction phi;
    double x;
  };
  const Case cases[] = {
      {donsker_rademacher(4), TestFunction::square(), 1.5},
      {donsker_gaussian(4), TestFunction::square(), 1.5},
      {donsker_gaussian(4), TestFunction::exp_bounded(0.7), 0.5},
      {donsker_gaussian(4), TestFunction::indicator_ge(0.25), 0.0},
      {KernelFamily::poisson(1.0, 8), TestFunction::identity(), 2.0},
      {KernelFamily::custom({{0.0, 1.0, 0.5}, {-1.0, 0.0, 0.5}}, 2),
       TestFunction::indicator_ge(0.5), 0.0},
  };
  int case_id = 0;
  for (const auto& c : cases) {
    const double exact = c.kernel.walk_step_expectation(c.phi, c.x).value;
    rng::Stream s(100 + case_id++);
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = c.phi(c.kernel.sample_walk_step(c.x, s));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt(
        std::max(0.0, (sum_sq / n - mean * mean)) / static_cast<double>(n - 1));
    INFO(c.kernel.describe(), " phi=", c.phi.name());
    CHECK(std::fabs(mean - exact) <= 4.0 * std::max(se, 1e-12));
  }
}

TEST_CASE("Monte Carlo fallback needs a budget and reports a standard error") {
  const auto kernel = donsker_gaussian(4);
  const auto phi = TestFunction::from_table({{-1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}});
  CHECK_FALSE(kernel.has_exact_walk_operator(phi));
  CHECK_THROWS_AS((void)kernel.walk_step_expectation(phi, 0.0),
                  std::invalid_argument);
  rng::Stream s(55);
  const auto e = kernel.walk_step_expectation(phi, 0.0, 200000, &s);
  CHECK_FALSE(e.exact);
  CHECK(e.std_error > 0.0);
  // test-side quadrature oracle: trapezoid integration of phi against the
  // N(0, 1/4) walk increment
  const double sd = kernel.walk_sd();
  double quad = 0.0;
  const double h = 1e-3;
  for (double z = -8.0; z < 8.0; z += h) {
    const double mid = z + 0.5 * h;
    quad += phi(mid * sd) * std::exp(-0.5 * mid * mid) / std::sqrt(2 * M_PI) * h;
  }
  CHECK(std::fabs(e.value - quad) <= 4.0 * e.std_error);
}

TEST_CASE("generator scaling identities") {
  SUBCASE("donsker x^2 -> exactly 1, any scale, any mean-0 var-1 increment") {
    for (std::uint64_t n : {1ull, 4ull, 12ull, 1024ull, 65536ull}) {
      CHECK(donsker_rademacher(n).generator_apply(TestFunction::square(), 1.7) == 1.0);
      CHECK(donsker_gaussian(n).generator_apply(TestFunction::square(), -0.3) == 1.0);
    }
  }
  SUBCASE("poisson indicator at the jump edge -> exactly lambda") {
    for (std::uint64_t n : {3ull, 100ull, 4096ull}) {
      const auto kernel = KernelFamily::poisson(1.0, n);
      CHECK(kernel.generator_apply(TestFunction::indicator_ge(1.0), 0.0) == 1.0);
    }
  }
  SUBCASE("generators kill constants") {
    const auto phi = TestFunction::constant(9.0);
    CHECK(donsker_rademacher(8).generator_apply(phi, 0.4) == 0.0);
    CHECK(KernelFamily::poisson(1.0, 8).generator_apply(phi, 1.0) == 0.0);
  }
  SUBCASE("walk_excess is generator/n") {
    const auto kernel = donsker_rademacher(8);
    CHECK(kernel.walk_excess(TestFunction::square(), 2.0) == 0.125);
  }
}

TEST_CASE("joint support rows") {
  const auto rows = KernelFamily::poisson(1.0, 8).joint_support();
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].prob == 0.75);
  CHECK(rows[1].shift1 == 1.0);
  const auto d = donsker_rademacher(1).joint_support();
  REQUIRE(d.size() == 2);
  CHECK(d[0].shift0 == -d[0].shift1);
}
