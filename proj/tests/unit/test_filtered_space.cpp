#include <doctest.h>

#include <random>

#include "itp/errors.hpp"
#include "itp/filtered_space.hpp"
#include "unit/fixtures.hpp"

using namespace itp;

TEST_CASE("rationals parse exactly and print canonically") {
  CHECK(*parse_rational("0.01") == Rational(1, 100));
  CHECK(*parse_rational("11/101") == Rational(11, 101));
  CHECK(*parse_rational("1.5e-6") == Rational(3, 2000000));
  CHECK(*parse_rational("-2") == Rational(-2));
  CHECK_FALSE(parse_rational("1/0"));
  CHECK_FALSE(parse_rational("abc"));
  CHECK(format_rational(Rational(11, 101)) == "11/101");
  CHECK(format_rational(Rational(1, 100)) == "0.01");
  CHECK(format_rational(Rational(17829983, 10)) == "1782998.3");
  CHECK(format_number(1e6) == "1000000");
  CHECK(format_number(0.1) == "0.1");
  CHECK(*parse_double(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_FALSE(parse_double("1.0x"));
}

TEST_CASE("space construction and atom queries") {
  auto sp = fixtures::three_states();
  CHECK(sp->num_states() == 3);
  CHECK(sp->last_time() == 2);
  CHECK(sp->num_atoms(1) == 2);
  CHECK(sp->atom_of(1, 2) == 1);
  CHECK(sp->ancestor(2, 1, 1) == 0);
  CHECK(sp->children(1, 0) == std::vector<std::size_t>{0, 1});
  CHECK(sp->describe_atom(1, 0) == "{a,b}");
  CHECK(sp->find_state("c") == std::optional<std::size_t>(2));
  CHECK(is_measurable(*sp, 1, Event::of(3, {0, 1})));
  CHECK_FALSE(is_measurable(*sp, 1, Event::of(3, {0})));
}

TEST_CASE("non-refining partitions are rejected naming the atom") {
  try {
    FilteredSpace::from_ids({"a", "b", "c"}, {0, 1, 2},
                            {{{"a", "b", "c"}}, {{"a", "b"}, {"c"}}, {{"a", "c"}, {"b"}}});
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("{a,c}") != std::string::npos);
  }
  CHECK_THROWS_AS(FilteredSpace::from_ids({"a", "b"}, {0}, {{{"a"}, {"b"}}}), InvariantError);
  CHECK_THROWS_AS(FilteredSpace::from_ids({"a", "b"}, {0, 1}, {{{"a", "b"}}, {{"a"}}}),
                  InvariantError);
}

TEST_CASE("conditional expectation by hand") {
  auto sp = fixtures::three_states();
  ProbabilityMeasure p({0.2, 0.3, 0.5});
  Act f(2, {1.0, 2.0, 3.0});
  auto ce = conditional_expectation(*sp, p, f, 1);
  CHECK(ce.value[0] == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(ce.value[1] == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(ce.value[2] == 3.0);
  auto e0 = conditional_atom_values(*sp, p, f.values(), 0);
  CHECK(e0[0] == doctest::Approx(0.2 + 0.6 + 1.5).epsilon(1e-15));
}

TEST_CASE("null atoms are filled with zero") {
  auto sp = fixtures::three_states();
  ProbabilityMeasure p({0.0, 0.0, 1.0});
  auto ce = conditional_expectation(*sp, p, Act(2, {5.0, 7.0, 1.0}), 1);
  CHECK(ce.value[0] == 0.0);
  CHECK(ce.null_atoms == std::vector<std::size_t>{0});
  auto nulls = null_events(*sp, p, 2);
  CHECK(nulls.atoms == std::vector<std::size_t>{0, 1});
  CHECK(nulls.is_null(Event::of(3, {1})));
  CHECK_FALSE(nulls.is_null(Event::of(3, {2})));
}

TEST_CASE("tower property on random measures") {
  auto sp = fixtures::three_states();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    std::vector<double> w{u(rng), u(rng), u(rng)};
    const double t = w[0] + w[1] + w[2];
    for (auto& x : w) x /= t;
    ProbabilityMeasure p(w);
    Act f(2, {u(rng) - 0.5, u(rng) * 3, -u(rng)});
    auto inner = conditional_expectation(*sp, p, f, 1).value;
    auto outer = conditional_atom_values(*sp, p, inner.values(), 0);
    auto direct = conditional_atom_values(*sp, p, f.values(), 0);
    CHECK(outer[0] == doctest::Approx(direct[0]).epsilon(1e-14));
  }
}

TEST_CASE("exact conditional expectation") {
  auto sp = fixtures::three_states();
  ProbabilityMeasure p(std::vector<Rational>{Rational(1, 3), Rational(1, 6), Rational(1, 2)});
  std::vector<Rational> v{Rational(3), Rational(6), Rational(1)};
  auto e = conditional_atom_values_exact(*sp, p, v, 1);
  CHECK(e[0] == Rational(4));
  CHECK(e[1] == Rational(1));
  CHECK_THROWS_AS(ProbabilityMeasure(std::vector<Rational>{Rational(1, 3), Rational(1, 3)}),
                  InvariantError);
}

TEST_CASE("paste, restrict and measurability of acts") {
  auto sp = fixtures::three_states();
  Act f(2, {1, 2, 3});
  Act g(2, {9, 9, 9});
  Act h = paste(f, g, Event::of(3, {0, 1}));
  CHECK(h == Act(2, {1, 2, 9}));
  CHECK(restrict(f, Event::of(3, {2})) == Act(2, {0, 0, 3}));
  CHECK(sup_distance(f, g) == 8.0);
  CHECK(describe(*sp, Act::from_atoms(*sp, 1, std::vector<double>{1, 2})) == "{a,b}=1 {c}=2");
  CHECK_THROWS_AS(require_measurable(*sp, Act(1, {1, 2, 3})), InvariantError);
  CHECK_THROWS_AS(Act(0, {std::nan(""), 0, 0}), InvariantError);
}

TEST_CASE("measure validation and equivalence") {
  CHECK_THROWS_AS(ProbabilityMeasure({0.5, 0.6}), InvariantError);
  CHECK_THROWS_AS(ProbabilityMeasure({-0.1, 1.1}), InvariantError);
  ProbabilityMeasure a({0.5, 0.5, 0.0});
  ProbabilityMeasure b({0.1, 0.9, 0.0});
  ProbabilityMeasure c({0.1, 0.8, 0.1});
  CHECK(a.equivalent_to(b));
  CHECK_FALSE(a.equivalent_to(c));
}
