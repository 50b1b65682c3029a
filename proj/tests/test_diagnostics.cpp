#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "treechain/diagnostics.hpp"
#include "treechain/enumeration.hpp"
#include "treechain/stats.hpp"

using namespace treechain;

namespace {

KernelFamily donsker_rademacher(std::uint64_t n) {
  return KernelFamily::donsker(IncrementLaw::rademacher(), n);
}

KernelFamily donsker_gaussian(std::uint64_t n) {
  return KernelFamily::donsker(IncrementLaw::gaussian(1.0), n);
}

KernelFamily frozen_kernel(std::uint64_t n) {  // deterministic: children = parent
  return KernelFamily::symmetric_product(IncrementLaw::point_mass(0.0), n);
}

const VertexRngPolicy kPolicy{1};

}  // namespace

TEST_CASE("generations_at floors n*t") {
  CHECK(generations_at(8, 1.0) == 8);
  CHECK(generations_at(10, 0.3) == 3);
  CHECK(generations_at(4, 0.0) == 0);
  CHECK_THROWS_AS((void)generations_at(4, -1.0), std::invalid_argument);
}

TEST_CASE("martingale paths") {
  SUBCASE("deterministic kernel: M identically zero") {
    const auto p =
        martingale_path(frozen_kernel(8), 1.0, TestFunction::square(), 1.0, kPolicy);
    for (const double v : p.values) REQUIRE(v == 0.0);
  }
  SUBCASE("donsker/rademacher with identity: M identically zero (dyadic scale)") {
    const auto p =
        martingale_path(donsker_rademacher(4), 0.0, TestFunction::identity(), 1.0,
                        kPolicy);
    for (const double v : p.values) REQUIRE(v == 0.0);
    for (const double c : p.compensator) REQUIRE(c == 0.0);
  }
  SUBCASE("donsker/rademacher with x^2: compensator is exactly j/n") {
    const auto p = martingale_path(donsker_rademacher(8), 0.0,
                                   TestFunction::square(), 1.0, kPolicy);
    REQUIRE(p.values.size() == 9);
    for (std::size_t j = 0; j < p.compensator.size(); ++j)
      REQUIRE(p.compensator[j] == static_cast<double>(j) * 0.125);
    // M_1 = <Z_8, x^2> - 1, recomputed from the same seed's tree
    const auto g = simulate_full_tree(donsker_rademacher(8), 0.0, 8, kPolicy);
    const double zphi = integrate(empirical_from_buffer(g), TestFunction::square());
    CHECK(p.values.back() == zphi - 1.0);
  }
  SUBCASE("mean-zero at the horizon over 500 replicates") {
    // <Z_k, x^2> is a.s. constant under rademacher increments, so the SE
    // degenerates to 0; the floor absorbs the one-ulp summation residue.
    const auto e = martingale_ensemble(donsker_rademacher(8), 0.0,
                                       TestFunction::square(), 1.0, 500, kPolicy, 2);
    CHECK(std::fabs(e.mean_terminal) <= 4.0 * e.se_terminal + 1e-12);
    // gaussian increments make M genuinely random
    const auto eg = martingale_ensemble(donsker_gaussian(8), 0.0,
                                        TestFunction::square(), 1.0, 500, kPolicy, 2);
    CHECK(eg.se_terminal > 1e-6);
    CHECK(std::fabs(eg.mean_terminal) <= 4.0 * eg.se_terminal + 1e-12);
  }
  SUBCASE("the exact walk operator is required") {
    const auto phi = TestFunction::from_table({{-1.0, 0.0}, {1.0, 1.0}});
    CHECK_THROWS_AS((void)martingale_path(donsker_gaussian(4), 0.0, phi, 1.0, kPolicy),
                    std::domain_error);
  }
}

TEST_CASE("martingale sup decay") {
  SUBCASE("deterministic kernel: zero at every scale") {
    const auto rows = martingale_sup_decay(frozen_kernel(4), 2.0,
                                           TestFunction::square(), 1.0, {4, 8}, 40,
                                           kPolicy, 2);
    for (const auto& r : rows) CHECK(r.value == 0.0);
  }
  SUBCASE("donsker/gaussian x^2: median shrinks from n=4 to n=16") {
    const auto rows = martingale_sup_decay(donsker_gaussian(4), 0.0,
                                           TestFunction::square(), 1.0, {4, 16}, 200,
                                           kPolicy, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].value < rows[0].value);
  }
  SUBCASE("fewer than 30 replicates rejected") {
    CHECK_THROWS_AS((void)martingale_sup_decay(donsker_gaussian(4), 0.0,
                                               TestFunction::square(), 1.0, {4}, 1,
                                               kPolicy),
                    std::invalid_argument);
  }
}

TEST_CASE("pair covariance") {
  SUBCASE("deterministic kernel: exactly zero with a degenerate interval") {
    const auto r = pair_covariance(frozen_kernel(4), 1.0, 1.0,
                                   TestFunction::square(), 100, kPolicy, 2);
    CHECK(r.estimate == 0.0);
    CHECK(r.lo == 0.0);
    CHECK(r.hi == 0.0);
  }
  SUBCASE("donsker/rademacher n=1 at generation 2, phi = identity") {
    // Distinct-pair covariance is -2/3 here: the antithetic coupling
    // anti-correlates leaves on opposite sides of the root. (The
    // independent-pair variant is exactly 0 because <Z, id> vanishes;
    // mean_square below is that variant.)
    const auto kernel = donsker_rademacher(1);
    const auto r = pair_covariance(kernel, 0.0, 2.0, TestFunction::identity(), 2000,
                                   kPolicy, 2);
    const auto sm =
        enumerate_second_moment(kernel, 0.0, 2, TestFunction::identity());
    const double oracle = sm.pair_product_distinct - sm.mean * sm.mean;
    CHECK(oracle == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
    CHECK(sm.mean_square == 0.0);
    CHECK(r.estimate < 0.0);
    CHECK(r.lo <= oracle);
    CHECK(r.hi >= oracle);
  }
  SUBCASE("enumeration pins the estimate for x^2 at generation 2") {
    const auto kernel = donsker_rademacher(1);
    const auto r = pair_covariance(kernel, 0.0, 2.0, TestFunction::square(), 2000,
                                   kPolicy, 2);
    const auto sm = enumerate_second_moment(kernel, 0.0, 2, TestFunction::square());
    const double oracle = sm.pair_product_distinct - sm.mean * sm.mean;
    CHECK(r.lo <= oracle);
    CHECK(r.hi >= oracle);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS((void)pair_covariance(donsker_rademacher(4), 0.0, 1.0,
                                          TestFunction::square(), 10, kPolicy),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)pair_covariance(donsker_rademacher(4), 0.0, 0.0,
                                          TestFunction::square(), 100, kPolicy),
                    std::invalid_argument);
  }
}

TEST_CASE("variance decay") {
  SUBCASE("exact anchor: Var[<Z_1, x^2>] = Var[Y^2] = 2 at n = 1") {
    const auto rows = variance_decay(donsker_gaussian(1), 0.0,
                                     TestFunction::square(), 1.0, {1}, 400, kPolicy,
                                     2);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].lo <= 2.0);
    CHECK(rows[0].hi >= 2.0);
    CHECK(rows[0].value == doctest::Approx(2.0).epsilon(0.35));
  }
  SUBCASE("deterministic kernel: zero variance at every scale") {
    const auto rows = variance_decay(frozen_kernel(4), 3.0, TestFunction::square(),
                                     1.0, {2, 4}, 60, kPolicy, 2);
    for (const auto& r : rows) CHECK(r.value == 0.0);
  }
  SUBCASE("shrinks with n (light sweep)") {
    const auto rows = variance_decay(donsker_gaussian(4), 0.0,
                                     TestFunction::square(), 1.0, {4, 12}, 150,
                                     kPolicy, 2);
    CHECK(rows[1].value < rows[0].value);
  }
}

TEST_CASE("lln_check") {
  SUBCASE("t = 0: the surrogate is a point mass and the distance is 0") {
    const auto v = lln_check(donsker_rademacher(64), 0.0, 0.0, 1000,
                             LimitLaw::point_mass(0.0), 0.01, kPolicy);
    CHECK(v.distance == 0.0);
    CHECK(v.pass);
  }
  SUBCASE("donsker at moderate scale against N(0,1)") {
    const auto v = lln_check(donsker_gaussian(64), 0.0, 1.0, 4000,
                             LimitLaw::normal(1.0), 0.05, kPolicy);
    CHECK(v.distance_kind == "ks");
    CHECK(v.pass);
    CHECK(v.second_moment == doctest::Approx(1.0).epsilon(0.15));
  }
  SUBCASE("poisson at moderate scale against Poi(1)") {
    const auto v = lln_check(KernelFamily::poisson(1.0, 64), 0.0, 1.0, 4000,
                             LimitLaw::poisson(1.0, 1.0), 0.08, kPolicy);
    CHECK(v.distance_kind == "tv");
    CHECK(v.pass);
    CHECK(v.prob_zero == doctest::Approx(std::exp(-1.0)).epsilon(0.15));
  }
  SUBCASE("verdicts are deterministic given config and seed") {
    const auto v1 = lln_check(donsker_gaussian(32), 0.0, 1.0, 2000,
                              LimitLaw::normal(1.0), 0.05, kPolicy);
    const auto v2 = lln_check(donsker_gaussian(32), 0.0, 1.0, 2000,
                              LimitLaw::normal(1.0), 0.05, kPolicy);
    CHECK(v1.distance == v2.distance);
  }
  SUBCASE("preconditions and mismatches") {
    CHECK_THROWS_AS((void)lln_check(donsker_gaussian(8), 0.0, 1.0, 10,
                                    LimitLaw::normal(1.0), 0.05, kPolicy),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)lln_check(donsker_gaussian(8), 0.0, 1.0, 2000,
                                    LimitLaw::poisson(1.0, 1.0), 0.05, kPolicy),
                    std::invalid_argument);
  }
}

TEST_CASE("second-moment decomposition holds statistically at k = 12") {
  // E[<Z,phi>^2] = E[phi phi' distinct] + 2^-k (E[phi^2] - E[phi phi' distinct]),
  // each side estimated by an independent sampling route.
  const auto kernel = donsker_gaussian(16);
  const auto phi = TestFunction::square();
  const std::uint32_t k = 12;
  const double t = static_cast<double>(k) / 16.0;
  const int reps = 400;
  std::vector<double> zsq(reps), marg_sq(reps);
  for (int r = 0; r < reps; ++r) {
    const auto g = simulate_full_tree(kernel, 0.0, k, kPolicy.replicate(r));
    const auto z = empirical_from_buffer(g);
    const double v = integrate(z, phi);
    zsq[r] = v * v;
    marg_sq[r] = integrate(z, TestFunction::quartic());  // <Z, phi^2>
  }
  const auto pc = pair_covariance(kernel, 0.0, t, phi, 4000, kPolicy, 2);
  // E[phi phi'] = cov + E[phi]^2 with E[phi(X_S1)] = t exactly
  const double pair_product = pc.estimate + t * t;
  const double lhs = stats::mean(zsq);
  const double rhs = pair_product +
                     std::ldexp(1.0, -static_cast<int>(k)) *
                         (stats::mean(marg_sq) - pair_product);
  const double se_lhs = std::sqrt(stats::sample_variance(zsq) / reps);
  const double se_pair = 0.5 * (pc.hi - pc.lo) / 1.96;
  const double combined = std::sqrt(se_lhs * se_lhs + se_pair * se_pair) + 1e-12;
  INFO("lhs = ", lhs, " rhs = ", rhs, " combined SE = ", combined);
  CHECK(std::fabs(lhs - rhs) <= 4.0 * combined);
}

TEST_CASE("tree mean matches walk mean at a simulated scale (k = 12)") {
  // E<Z_k, phi> should match E[phi(R_k)] = k/n for phi = x^2 (variance
  // accumulates linearly); statistical at 4 SE over 200 replicates.
  const auto kernel = donsker_gaussian(16);
  const std::uint32_t k = 12;
  std::vector<double> values(200);
  for (int r = 0; r < 200; ++r) {
    const auto g = simulate_full_tree(kernel, 0.0, k, kPolicy.replicate(r));
    values[r] = integrate(empirical_from_buffer(g), TestFunction::square());
  }
  const double mean = stats::mean(values);
  const double se =
      std::sqrt(stats::sample_variance(values) / static_cast<double>(values.size()));
  const double expected = static_cast<double>(k) / 16.0;
  CHECK(std::fabs(mean - expected) <= 4.0 * se);
}
