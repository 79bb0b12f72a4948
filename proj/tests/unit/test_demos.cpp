#include <doctest.h>

#include <filesystem>

#include "itp/demos.hpp"
#include "itp/errors.hpp"

using namespace itp;

namespace {
const std::filesystem::path kDir = ITP_SCENARIO_DIR;
}

TEST_CASE("villa under paper arithmetic") {
  auto r = run_villa(villa_scenario());
  CHECK(r.displayed_t1 == Rational(1000000));
  CHECK(r.displayed_t2 == Rational(17829983, 10));
  CHECK(r.t1_cce_exact == Rational(1000000));
  CHECK(r.t1_cce == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(r.t2_relative_gap <= 1e-6);
  CHECK(r.t0_vs_t2.tag == VerdictTag::Preceq);
  CHECK(r.t1_vs_t2.tag == VerdictTag::Mixed);
  CHECK(r.t1_vs_t2.parts.b.same_states(Event::of(3, {0})));
  CHECK(r.t1_vs_t2.parts.c.same_states(Event::of(3, {1, 2})));
}

TEST_CASE("villa under the stated measure") {
  auto r = run_villa(villa_scenario(), "paper-stated");
  CHECK(r.t1_cce_exact == Rational(1099900));
}

TEST_CASE("dpp on the binomial scenario") {
  auto spec = load_scenario(kDir / "binomial.sdu");
  StrategySet set(spec);
  CHECK(set.decisions() == 3);
  CHECK(set.size() == 27);
  auto w = set.wealth(0);
  CHECK(w.size() == 3);
  CHECK(w[2][0] == doctest::Approx(1.0));
  auto r = run_dpp(spec);
  CHECK(r.dominance);
  CHECK(r.equality);
  CHECK(r.equality_gap <= 1e-9);
  CHECK(r.dominance_margin >= -1e-12);
}

TEST_CASE("forward performance on the martingale scenario") {
  auto spec = load_scenario(kDir / "forward_martingale.sdu");
  auto ok = run_forward_check(spec);
  CHECK(ok.pass());
  auto deflated = run_forward_check(spec, {}, 1e-9, 0.9);
  CHECK_FALSE(deflated.martingale);
  CHECK_FALSE(deflated.pass());
}

TEST_CASE("strategy section is required") {
  const auto spec = villa_scenario();
  CHECK_THROWS_AS(StrategySet{spec}, PreconditionError);
}
