#include <doctest.h>

#include <cmath>
#include <random>

#include "itp/errors.hpp"
#include "itp/utility_field.hpp"
#include "unit/fixtures.hpp"

using namespace itp;

TEST_CASE("curve values") {
  CHECK(MonotoneCurve::identity()(2.5) == 2.5);
  CHECK(MonotoneCurve::linear(3)(2) == 6);
  auto e = MonotoneCurve::exponential(1);
  CHECK(e(1.0) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(e(0.0) == 0.0);
  auto pw = MonotoneCurve::power(0.5);
  CHECK(pw(4.0) == doctest::Approx(2.0));
  CHECK(pw(-4.0) == doctest::Approx(-2.0));
  auto pl = MonotoneCurve::piecewise_linear({{-1, -2}, {0, 0}, {1, 0.5}});
  CHECK(pl(2e5) == 1e5);
  CHECK(pl(-3) == -6);
  CHECK(pl(0.5) == 0.25);
}

TEST_CASE("curve invariants") {
  CHECK_THROWS_AS(MonotoneCurve::piecewise_linear({{-1, -1}, {1, 3}}), InvariantError);
  CHECK_THROWS_AS(MonotoneCurve::piecewise_linear({{0, 0}, {1, 0}}), InvariantError);
  CHECK_THROWS_AS(MonotoneCurve::exponential(0), InvariantError);
  CHECK_THROWS_AS(MonotoneCurve::power(-1), InvariantError);
  CHECK_THROWS_AS(MonotoneCurve::linear(0), InvariantError);
}

TEST_CASE("inversion round trips on every kind") {
  std::vector<MonotoneCurve> curves{
      MonotoneCurve::identity(), MonotoneCurve::linear(0.7), MonotoneCurve::exponential(1.3),
      MonotoneCurve::exponential(-0.5), MonotoneCurve::power(0.6), MonotoneCurve::power(1.4),
      MonotoneCurve::piecewise_linear({{-2, -3}, {0, 0}, {1, 0.25}, {3, 2}}),
      MonotoneCurve::power(0.8).scaled_input(2).scaled_output(3)};
  for (const auto& c : curves) {
    for (double x : {-3.0, -1.0, -0.1, 0.0, 0.2, 1.0, 2.5}) {
      auto r = invert(c, c(x));
      CHECK_FALSE(r.gap);
      CHECK(r.x == doctest::Approx(x).epsilon(1e-10));
    }
  }
}

TEST_CASE("inversion range errors") {
  auto e = MonotoneCurve::exponential(1);
  CHECK_THROWS_AS(invert(e, 1.0), RangeError);
  CHECK_THROWS_AS(invert(e, 2.0), RangeError);
  CHECK_NOTHROW(invert(e, 0.99));
}

TEST_CASE("jumps: limits, gaps and transforms") {
  auto c = MonotoneCurve::identity().with_jump({1.0, 0.25, 0.25});
  CHECK(c(0) == 0);
  CHECK(c(1) - c.left_limit(1) == doctest::Approx(0.25));
  CHECK(c.right_limit(1) - c(1) == doctest::Approx(0.25));
  CHECK_FALSE(c.continuous());
  auto r = invert(c, c(1) + 0.1);
  CHECK(r.gap);
  CHECK(r.x == 1.0);
  CHECK(invert(c, c(2)).x == doctest::Approx(2.0));
  auto s = c.scaled_input(2);
  CHECK(s.jumps().front().at == 0.5);
  CHECK(c.to_string() == "identity jump(1,0.25,0.25)");
}

TEST_CASE("field evaluation is measurable per atom") {
  auto sp = fixtures::three_states();
  UtilityField u(sp, {{MonotoneCurve::identity()},
                      {MonotoneCurve::linear(2), MonotoneCurve::identity()},
                      {MonotoneCurve::identity(), MonotoneCurve::identity(),
                       MonotoneCurve::exponential(1)}});
  CHECK(u.is_measurable());
  auto v = u.evaluate(1, Act(1, {1, 1, 3}).values());
  CHECK(v == std::vector<double>{2, 2, 3});
  CHECK(eval(u, 2, Act(0, {1, 1, 1}))[2] == doctest::Approx(1 - std::exp(-1.0)));
  auto per_state = UtilityField::unchecked_per_state(
      sp, {{MonotoneCurve::identity(), MonotoneCurve::identity(), MonotoneCurve::identity()},
           {MonotoneCurve::identity(), MonotoneCurve::linear(2), MonotoneCurve::identity()},
           {MonotoneCurve::identity(), MonotoneCurve::identity(), MonotoneCurve::identity()}});
  CHECK_FALSE(per_state.is_measurable());
}

TEST_CASE("star-continuity detector") {
  auto sp = fixtures::three_states();
  auto id = MonotoneCurve::identity();
  auto jumpy = id.with_jump({0.5, 0.0, 0.3});
  UtilityField f(sp, {{id}, {id, id}, {id, jumpy, id}});
  SUBCASE("jump on a positive atom is flagged with a positive-probability witness") {
    ProbabilityMeasure p({0.2, 0.3, 0.5});
    auto r = is_star_continuous(f, p);
    REQUIRE_FALSE(r.star_continuous);
    REQUIRE(r.witness);
    auto d = discontinuity_sets(f, *r.witness_time, *r.witness);
    CHECK(p.probability(d.any) > 0.0);
    CHECK(d.right.contains(1));
    CHECK_FALSE(d.left.contains(1));
  }
  SUBCASE("jump on a null atom passes") {
    ProbabilityMeasure p({0.5, 0.0, 0.5});
    CHECK(is_star_continuous(f, p).star_continuous);
  }
  SUBCASE("continuous field passes") {
    CHECK(is_star_continuous(UtilityField::uniform(sp, id), ProbabilityMeasure({0.2, 0.3, 0.5}))
              .star_continuous);
  }
}
