#include <doctest.h>

#include <cmath>
#include <random>

#include "itp/errors.hpp"
#include "itp/preference_engine.hpp"
#include "itp/random_models.hpp"
#include "unit/fixtures.hpp"

using namespace itp;

TEST_CASE("identity field: cce is the conditional expectation") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::identity());
  Act f(2, {1, 2, 3});
  Act c = cce(rep, 1, 2, f);
  CHECK(c[0] == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(c[2] == 3.0);
  CHECK(cce(rep, 0, 2, f)[0] == doctest::Approx(2.3).epsilon(1e-15));
}

TEST_CASE("exponential field: cce is -ln E[exp(-f)]") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::exponential(1));
  Act f(2, {1, -2, 0.5});
  const double expected = -std::log(0.2 * std::exp(-1.0) + 0.3 * std::exp(2.0) + 0.5 * std::exp(-0.5));
  CHECK(cce(rep, 0, 2, f)[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("compare tri-partition") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::identity());
  Act f(2, {1, 2, 3});
  auto v = compare(rep, 1, 2, Act(1, {1.6, 1.6, 2}), f);
  CHECK(v.tag == VerdictTag::Preceq);
  CHECK(v.parts.a.same_states(Event::of(3, {0, 1})));
  CHECK(v.parts.c.same_states(Event::of(3, {2})));
  auto m = compare(rep, 1, 2, Act(1, {2, 2, 2}), f);
  CHECK(m.tag == VerdictTag::Mixed);
  CHECK(m.parts.b.same_states(Event::of(3, {0, 1})));
  CHECK(compare(rep, 0, 2, Act(0, {3, 3, 3}), f).tag == VerdictTag::Succeq);
  CHECK(compare(rep, 0, 2, Act(0, {2, 2, 2}), f).tag == VerdictTag::Preceq);
  CHECK(compare(rep, 0, 2, Act(0, {2.3, 2.3, 2.3}), f).tag == VerdictTag::Equiv);
  CHECK(to_string(VerdictTag::Preceq) == "PRECEQ");
  CHECK_THROWS_AS(compare(rep, 2, 1, f, f), PreconditionError);
}

TEST_CASE("g measured earlier than s is read on the atoms at s") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::identity());
  auto v = compare(rep, 1, 2, Act(0, {2, 2, 2}), Act(2, {1, 2, 3}));
  CHECK(v.parts.b.same_states(Event::of(3, {0, 1})));
  CHECK(v.parts.c.same_states(Event::of(3, {2})));
}

TEST_CASE("null atoms get cce 0 and no verdict") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.0, 0.0, 1.0}, MonotoneCurve::identity());
  Act c = cce(rep, 1, 2, Act(2, {4, 5, 6}));
  CHECK(c[0] == 0.0);
  CHECK(c[2] == 6.0);
  auto v = compare(rep, 1, 2, Act(1, {100, 100, 6}), Act(2, {4, 5, 6}));
  CHECK(v.tag == VerdictTag::Equiv);
}

TEST_CASE("semigroup and time consistency on random representations") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    auto rep = random_representation(rng);
    const auto& sp = rep.space();
    for (std::size_t v = 2; v <= sp.last_time(); ++v) {
      Act f = random_act(sp, v, rng);
      for (std::size_t s = 0; s + 1 < v; ++s) {
        for (std::size_t t = s + 1; t < v; ++t) {
          CHECK(semigroup_residual(rep, s, t, v, f) <= 1e-8);
        }
      }
    }
    Act f = random_act(sp, sp.last_time(), rng);
    Act c = cce(rep, 0, sp.last_time(), f);
    CHECK(time_consistency_check(rep, 0, 1, sp.last_time(), c.plus(0.5), f));
    CHECK(time_consistency_check(rep, 0, 1, sp.last_time(), c.plus(-0.5), f));
  }
}

TEST_CASE("cce is monotone in the act") {
  std::mt19937_64 rng(5);
  auto rep = random_representation(rng);
  const auto& sp = rep.space();
  for (int n = 0; n < 30; ++n) {
    Act f = random_act(sp, sp.last_time(), rng);
    Act g = f.plus(0.1);
    Act cf = cce(rep, 0, sp.last_time(), f);
    Act cg = cce(rep, 0, sp.last_time(), g);
    CHECK(cg[0] > cf[0]);
  }
}

TEST_CASE("discount factor is 1 when P* = P and verdicts survive both transforms") {
  std::mt19937_64 rng(9);
  auto rep = random_representation(rng);
  auto same = discount_transform(rep, rep.measure(), 1, 30);
  for (const auto& b : same.beta) {
    for (double x : b.values()) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(same.check);
  auto other = discount_transform(rep, random_equivalent(rep.measure(), rng), 2, 30);
  CHECK(other.flips == 0);
  std::vector<Act> numeraire;
  for (std::size_t t = 0; t < rep.space().num_times(); ++t) {
    std::vector<double> v(rep.space().num_atoms(t));
    for (auto& x : v) x = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    numeraire.push_back(Act::from_atoms(rep.space(), t, v));
  }
  auto num = numeraire_transform(rep, numeraire, 3, 30);
  CHECK(num.flips == 0);
  CHECK(num.check);
}

TEST_CASE("representation validation") {
  auto sp = fixtures::three_states();
  auto id = MonotoneCurve::identity();
  UtilityField jumpy(sp, {{id}, {id, id}, {id.with_jump({1, 0, 1}), id, id}});
  CHECK_THROWS_AS(Representation(sp, ProbabilityMeasure({0.2, 0.3, 0.5}), jumpy), InvariantError);
  CHECK_NOTHROW(Representation(sp, ProbabilityMeasure({0.0, 0.5, 0.5}), jumpy));
  UtilityField bad_u0(sp, {{id.with_jump({1, 0, 1})}, {id, id}, {id, id, id}});
  CHECK_THROWS_AS(Representation(sp, ProbabilityMeasure({0.2, 0.3, 0.5}), bad_u0),
                  InvariantError);
}
