#include "zdsec/game.hpp"

#include <cmath>

#include "doctest.h"
#include "testutil.hpp"
#include "zdsec/rng.hpp"

using namespace zdsec;
using test::fixture_game;
using test::fixture_stubborn;
using test::power_iteration_stationary;
using test::random_strategy;

TEST_CASE("assumption check names the failing inequality") {
  StageGame g = fixture_game();
  CHECK(g.satisfies_assumption1());
  g.u_a[0][0] = 6.0;  // now U11^a >= U12^a
  CHECK(g.assumption1_violation().find("U11^a < U12^a") != std::string::npos);
  CHECK_THROWS_AS(g.require_assumption1(), PreconditionError);
}

TEST_CASE("build_chain: product structure") {
  const MemoryOneStrategy half = strategy(0.5, 0.5, 0.5, 0.5);
  const MarkovChain uniform = build_chain(half, half);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) CHECK(uniform.m[s][t] == doctest::Approx(0.25));

  const MarkovChain det = build_chain(strategy(1, 1, 1, 1), strategy(1, 1, 1, 1));
  for (int s = 0; s < 4; ++s) {
    CHECK(det.m[s][kS11] == 1.0);
    CHECK(det.m[s][kS12] == 0.0);
  }

  // Scalar-by-scalar oracle on a generic pair.
  const MemoryOneStrategy pd = strategy(0.9, 0.7, 0.2, 0.4);
  const MemoryOneStrategy pa = strategy(0.3, 0.5, 0.8, 0.1);
  const MarkovChain c = build_chain(pd, pa);
  CHECK(c.m[kS11][kS11] == doctest::Approx(0.27).epsilon(1e-15));
  CHECK(c.m[kS11][kS12] == doctest::Approx(0.63).epsilon(1e-15));
  CHECK(c.m[kS11][kS21] == doctest::Approx(0.03).epsilon(1e-15));
  CHECK(c.m[kS11][kS22] == doctest::Approx(0.07).epsilon(1e-15));
  for (int s = 0; s < 4; ++s) {
    double row = 0.0;
    for (int t = 0; t < 4; ++t) {
      const double pd1 = t < 2 ? pd.p[s] : 1.0 - pd.p[s];
      const double pa1 = (t % 2 == 0) ? pa.p[s] : 1.0 - pa.p[s];
      CHECK(c.m[s][t] == doctest::Approx(pd1 * pa1).epsilon(1e-15));
      row += c.m[s][t];
    }
    CHECK(std::abs(row - 1.0) <= 1e-12);
  }

  CHECK_THROWS_AS(build_chain(strategy(1.2, 0, 0, 0), half), InputDomainError);
}

TEST_CASE("stationary_distribution matches power iteration and handles "
          "degenerate chains") {
  const MemoryOneStrategy half = strategy(0.5, 0.5, 0.5, 0.5);
  const StationaryResult uni = stationary_distribution(build_chain(half, half));
  for (int i = 0; i < 4; ++i) CHECK(uni.v[i] == doctest::Approx(0.25));
  CHECK(uni.route == Route::kStationary);

  const MemoryOneStrategy pd = strategy(0.9, 0.7, 0.2, 0.4);
  const MemoryOneStrategy pa = strategy(0.3, 0.5, 0.8, 0.1);
  const MarkovChain c = build_chain(pd, pa);
  const StationaryResult st = stationary_distribution(c);
  CHECK(st.route == Route::kStationary);
  CHECK(sum(st.v) == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(st.v[i] >= 0.0);
  CHECK(linf_diff(row_times(st.v, c.m), st.v) <= 1e-10);
  CHECK(linf_diff(st.v, power_iteration_stationary(c.m)) <= 1e-10);

  // Absorbing chain: everything moves to state 11 and stays.
  const StationaryResult abso =
      stationary_distribution(build_chain(strategy(1, 1, 1, 1), strategy(1, 1, 1, 1)));
  CHECK(abso.v[kS11] == doctest::Approx(1.0));

  // Two closed classes: defender mixed, attacker repeats its own action.
  const MarkovChain split = build_chain(half, strategy(1, 0, 1, 0));
  const StationaryResult lim = stationary_distribution(split);
  CHECK(lim.route == Route::kPerturbedLimit);
  CHECK(sum(lim.v) == doctest::Approx(1.0).epsilon(1e-12));
  // Any mixture of class stationaries is still a fixed point.
  CHECK(linf_diff(row_times(lim.v, split.m), lim.v) <= 1e-10);
  // Exact limit agrees with the small-epsilon numeric solve.
  CHECK(linf_diff(lim.v, perturbed_stationary(split, 1e-8)) <= 1e-5);
}

TEST_CASE("stationary fallback for hand-built chains uses row mixing") {
  // A chain with two closed classes and no generating strategies attached.
  MarkovChain c;
  c.m = {{{1, 0, 0, 0}, {0, 1, 0, 0}, {0.5, 0, 0.5, 0}, {0, 0.5, 0, 0.5}}};
  const StationaryResult r = stationary_distribution(c);
  CHECK(r.route == Route::kPerturbedLimit);
  CHECK(sum(r.v) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(linf_diff(r.v, perturbed_stationary(c, 1e-8)) <= 1e-5);
}

TEST_CASE("perturbed limit equals numeric perturbation on random degenerate "
          "pairs") {
  CounterRng rng(2024, "perturbed-limit");
  for (int trial = 0; trial < 200; ++trial) {
    // Deterministic attacker policy + mixed defender: the classic source of
    // multiple recurrent classes.
    MemoryOneStrategy pd = random_strategy(rng);
    MemoryOneStrategy pa;
    for (int s = 0; s < 4; ++s) pa.p[s] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    if (rng.bernoulli(0.3))
      for (int s = 0; s < 4; ++s) pd.p[s] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const MarkovChain c = build_chain(pd, pa);
    const Vec4 exact = perturbed_limit_distribution(c);
    const Vec4 numeric = perturbed_stationary(c, 1e-8);
    CHECK(linf_diff(exact, numeric) <= 2e-5);
    CHECK(sum(exact) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("perturbed limit: exhaustive doubly-deterministic pairs") {
  // Every pair of deterministic strategies; the worst chains have up to
  // three recurrent classes plus transients.
  const StageGame g = fixture_game();
  for (int di = 0; di < 16; ++di) {
    MemoryOneStrategy pd;
    for (int s = 0; s < 4; ++s) pd.p[s] = (di >> s) & 1 ? 1.0 : 0.0;
    for (int ai = 0; ai < 16; ++ai) {
      MemoryOneStrategy pa;
      for (int s = 0; s < 4; ++s) pa.p[s] = (ai >> s) & 1 ? 1.0 : 0.0;
      const MarkovChain c = build_chain(pd, pa);
      const Vec4 exact = perturbed_limit_distribution(c);
      CHECK(sum(exact) == doctest::Approx(1.0).epsilon(1e-10));
      // Limits of stationary distributions are stationary.
      CHECK(linf_diff(row_times(exact, c.m), exact) <= 1e-10);
      CHECK(linf_diff(exact, perturbed_stationary(c, 1e-8)) <= 2e-5);
      // Utilities stay total and inside the hull.
      const UtilityPair u = long_run_utilities(g, pd, pa);
      CHECK(u.u_d >= g.defender_min() - 1e-9);
      CHECK(u.u_d <= g.defender_max() + 1e-9);
    }
  }
}

TEST_CASE("press_dyson_det basics") {
  CounterRng rng(7, "pd-det");
  const MemoryOneStrategy pd = random_strategy(rng);
  const MemoryOneStrategy pa = random_strategy(rng);
  CHECK(press_dyson_det(pd, pa, {0, 0, 0, 0}) == 0.0);

  // Multilinearity in the f column: negation flips the sign.
  const Vec4 f{1.3, -0.2, 0.8, 2.0};
  const Vec4 nf{-1.3, 0.2, -0.8, -2.0};
  CHECK(press_dyson_det(pd, pa, f) == doctest::Approx(-press_dyson_det(pd, pa, nf)));

  // Determinant ratio equals the stationary average.
  const MemoryOneStrategy pd2 = strategy(0.9, 0.7, 0.2, 0.4);
  const MemoryOneStrategy pa2 = strategy(0.3, 0.5, 0.8, 0.1);
  const StageGame g = fixture_game();
  const Vec4 v = power_iteration_stationary(build_chain(pd2, pa2).m);
  const double d1 = press_dyson_det(pd2, pa2, {1, 1, 1, 1});
  REQUIRE(std::abs(d1) > 1e-9);
  CHECK(press_dyson_det(pd2, pa2, g.defender_payoffs()) / d1 ==
        doctest::Approx(dot(v, g.defender_payoffs())).epsilon(1e-10));

  // Cofactor vector is the unnormalized stationary distribution.
  const Vec4 c = press_dyson_cofactors(pd2, pa2, pa2);
  for (int i = 0; i < 4; ++i)
    CHECK(c[i] / sum(c) == doctest::Approx(v[i]).epsilon(1e-10));
}

TEST_CASE("long_run_utilities on the standard game") {
  const StageGame g = fixture_game();
  const MemoryOneStrategy half = strategy(0.5, 0.5, 0.5, 0.5);
  const UtilityPair u = long_run_utilities(g, half, half);
  CHECK(u.u_d == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(u.u_a == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(u.route == Route::kDeterminant);

  const UtilityPair abso =
      long_run_utilities(g, strategy(1, 1, 1, 1), strategy(1, 1, 1, 1));
  CHECK(abso.u_d == doctest::Approx(5.0));
  CHECK(abso.u_a == doctest::Approx(1.0));

  // Utilities stay inside the payoff hull for arbitrary pairs.
  CounterRng rng(11, "hull");
  for (int i = 0; i < 300; ++i) {
    const UtilityPair r =
        long_run_utilities(g, random_strategy(rng), random_strategy(rng));
    CHECK(r.u_d >= g.defender_min() - 1e-9);
    CHECK(r.u_d <= g.defender_max() + 1e-9);
    CHECK(r.u_a >= g.attacker_min() - 1e-9);
    CHECK(r.u_a <= g.attacker_max() + 1e-9);
  }
}

TEST_CASE("determinant and stationary routes agree when both defined") {
  const StageGame g = fixture_game();
  CounterRng rng(13, "routes");
  int used = 0;
  for (int i = 0; i < 500; ++i) {
    const MemoryOneStrategy pd = random_strategy(rng);
    const MemoryOneStrategy pa = random_strategy(rng);
    const double d1 = press_dyson_det(pd, pa, {1, 1, 1, 1});
    if (std::abs(d1) <= 1e-6) continue;
    ++used;
    const UtilityPair det = long_run_utilities(g, pd, pa);
    const UtilityPair st = utilities_via_stationary(g, pd, pa);
    CHECK(std::abs(det.u_d - st.u_d) <= 1e-9);
    CHECK(std::abs(det.u_a - st.u_a) <= 1e-9);
  }
  CHECK(used > 400);
}

TEST_CASE("stubborn closed form") {
  const StageGame g = fixture_game();
  const StubbornStrategy st = fixture_stubborn();

  // Half/half weights: defender never stays on 1 after 11, always returns
  // from 21.
  const UtilityPair mid = stubborn_utilities(g, strategy(0, 0.3, 1, 0.9), st);
  CHECK(mid.u_d == doctest::Approx(2.5));
  CHECK(mid.u_a == doctest::Approx(2.5));
  CHECK(mid.route == Route::kStubbornClosedForm);

  // Weight on the (2,1) outcome vanishes when the defender locks state 11.
  const UtilityPair lock = stubborn_utilities(g, strategy(1, 0.2, 1, 0.7), st);
  CHECK(lock.u_d == doctest::Approx(5.0));
  CHECK(lock.u_a == doctest::Approx(1.0));

  // Degenerate denominator: absorbed-in-11 convention, flagged route.
  const UtilityPair deg = stubborn_utilities(g, strategy(1, 0.5, 0, 0.5), st);
  CHECK(deg.u_d == doctest::Approx(5.0));
  CHECK(deg.route == Route::kPerturbedLimit);

  // Exactly independent of the stubborn strategy's 12/22 behavior.
  CounterRng rng(17, "stubborn");
  for (int i = 0; i < 100; ++i) {
    const MemoryOneStrategy pd = random_strategy(rng);
    const StubbornStrategy s2(
        strategy(1.0, rng.next_double(), 1.0, rng.next_double()));
    const UtilityPair a = stubborn_utilities(g, pd, st);
    const UtilityPair b = stubborn_utilities(g, pd, s2);
    CHECK(a.u_d == b.u_d);
    CHECK(a.u_a == b.u_a);
  }

  // Agreement with the epsilon-perturbed chain oracle.
  for (int i = 0; i < 100; ++i) {
    MemoryOneStrategy pd = random_strategy(rng);
    // Keep the closed-form denominator away from zero; at scale eps the
    // perturbation itself dominates the outcome.
    if ((1.0 - pd.p[kS11]) + pd.p[kS21] < 0.05) pd.p[kS21] += 0.1;
    const UtilityPair cf = stubborn_utilities(g, pd, st);
    const Vec4 v = perturbed_stationary(build_chain(pd, st.strategy()), 1e-8);
    CHECK(std::abs(cf.u_d - dot(v, g.defender_payoffs())) <= 1e-6);
    CHECK(std::abs(cf.u_a - dot(v, g.attacker_payoffs())) <= 1e-6);
  }
}

TEST_CASE("mixture_strategy endpoints and arithmetic") {
  const StubbornStrategy st(strategy(1, 0, 1, 0));
  const MemoryOneStrategy br = strategy(0, 1, 0, 1);
  CHECK(mixture_strategy(br, st, 0.0).p == st.strategy().p);
  CHECK(mixture_strategy(br, st, 1.0).p == br.p);
  const MemoryOneStrategy m = mixture_strategy(br, st, 0.25);
  CHECK(m.p[0] == doctest::Approx(0.75));
  CHECK(m.p[1] == doctest::Approx(0.25));
  CHECK(m.p[2] == doctest::Approx(0.75));
  CHECK(m.p[3] == doctest::Approx(0.25));
  CHECK_THROWS_AS(mixture_strategy(br, st, 1.5), InputDomainError);
  CHECK_THROWS_AS(StubbornStrategy(strategy(0.9, 0, 1, 0)), InputDomainError);
  CHECK_THROWS_AS(MixtureAttacker(-0.1, st), InputDomainError);
}
