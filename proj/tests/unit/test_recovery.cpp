#include <doctest.h>

#include <algorithm>
#include <random>

#include "itp/recovery.hpp"
#include "itp/random_models.hpp"
#include "unit/fixtures.hpp"

using namespace itp;

TEST_CASE("one-period split: p~ proportional to p c and u = 2.8 x") {
  auto sp = fixtures::one_period();
  auto id = MonotoneCurve::identity();
  UtilityField u(sp, {{id},
                      {MonotoneCurve::linear(1), MonotoneCurve::linear(2), MonotoneCurve::linear(4)}});
  Representation rep(sp, ProbabilityMeasure({0.2, 0.3, 0.5}), u);
  InducedOracle oracle(rep);
  auto step = recover_step0(oracle, id);
  REQUIRE(step.atom_probability.size() == 3);
  CHECK(step.atom_probability[0] == doctest::Approx(1.0 / 14).epsilon(1e-9));
  CHECK(step.atom_probability[1] == doctest::Approx(3.0 / 14).epsilon(1e-9));
  CHECK(step.atom_probability[2] == doctest::Approx(10.0 / 14).epsilon(1e-9));
  for (const auto& c : step.curves) {
    for (double x : {-3.0, -1.0, 0.5, 2.0}) CHECK(c(x) == doctest::Approx(2.8 * x).epsilon(1e-8));
  }
  CHECK(step.debreu_residual <= 1e-9);
}

TEST_CASE("oracle cce matches the model") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::power(0.7));
  InducedOracle oracle(rep);
  Act f(2, {1.0, -2.0, 0.5});
  Act from_oracle = cce_from_oracle(oracle, 1, f);
  Act exact = cce(rep, 1, 2, f);
  CHECK(sup_distance(from_oracle, exact) <= 1e-9);
  CHECK(cce_from_oracle(oracle, 1, Act(2, {0, 0, 0}))[0] == 0.0);
}

TEST_CASE("identity field recovers itself") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::identity());
  auto sp1 = fixtures::one_period();
  auto rep1 = fixtures::uniform_rep(sp1, {0.2, 0.3, 0.5}, MonotoneCurve::identity());
  auto out = recover(InducedOracle(rep1), MonotoneCurve::identity());
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(out.rep.measure().weight(s) == doctest::Approx(rep1.measure().weight(s)).epsilon(1e-9));
  }
  auto u = check_relative_uniqueness(rep1, out.rep);
  CHECK(u.ok);
  CHECK(u.deviation <= 1e-9);
  CHECK_THROWS_AS(recover(InducedOracle(rep), MonotoneCurve::identity()), RecoveryError);
}

TEST_CASE("non-additive oracle is refused with its residual") {
  auto sp = fixtures::one_period();
  auto rep = fixtures::uniform_rep(sp, {0.2, 0.3, 0.5}, MonotoneCurve::identity());
  FunctionalOracle oracle(rep, 0, [&](std::size_t, const Act& f) {
    auto v = f.values();
    return *std::min_element(v.begin(), v.end());
  });
  try {
    recover_step0(oracle, MonotoneCurve::identity());
    FAIL("expected RecoveryError");
  } catch (const RecoveryError& e) {
    CHECK(e.step().debreu_residual > 0.1);
  }
}

TEST_CASE("random piecewise-linear models round trip and routes agree") {
  std::mt19937_64 rng(21);
  RandomModelOptions opt;
  opt.piecewise_linear_only = true;
  opt.min_first_atoms = 3;
  opt.min_periods = 2;
  opt.max_periods = 2;
  opt.max_states = 10;
  for (int n = 0; n < 3; ++n) {
    auto rep = random_representation(rng, opt);
    InducedOracle oracle(rep);
    Recovered out;
    try {
      out = recover(oracle, rep.u0());
    } catch (const RecoveryError& e) {
      // Later levels may lack three essential atoms.
      CHECK(std::string(e.what()).find("essential") != std::string::npos);
      continue;
    }
    auto u = check_relative_uniqueness(rep, out.rep);
    CHECK(u.ok);
    auto proof = recover_step_i(oracle, 1, out.steps[0].atom_probability, out.steps[0].curves);
    auto direct = recover_step_direct(oracle, 1, out.steps[0].atom_probability,
                                      out.steps[0].curves);
    for (std::size_t k = 0; k < proof.atom_probability.size(); ++k) {
      CHECK(proof.atom_probability[k] ==
            doctest::Approx(direct.atom_probability[k]).epsilon(1e-9));
    }
  }
}

TEST_CASE("uniqueness controls") {
  std::mt19937_64 rng(4);
  auto rep = random_representation(rng);
  auto p_star = random_equivalent(rep.measure(), rng);
  const auto& sp = rep.space();
  std::vector<std::vector<MonotoneCurve>> curves(sp.num_times());
  for (std::size_t i = 0; i < sp.num_times(); ++i) {
    auto pa = rep.measure().atom_probabilities(sp, i);
    auto pb = p_star.atom_probabilities(sp, i);
    for (std::size_t k = 0; k < sp.num_atoms(i); ++k) {
      curves[i].push_back(rep.field().curve(i, k).scaled_output(pa[k] / pb[k]));
    }
  }
  Representation scaled(rep.space_ptr(), p_star, UtilityField(rep.space_ptr(), curves));
  auto ok = check_relative_uniqueness(rep, scaled);
  CHECK(ok.ok);
  CHECK(ok.deviation <= 1e-9);

  auto bumped = curves;
  const auto& c = bumped[1][0];
  std::vector<std::pair<double, double>> pts;
  for (double x : default_recovery_grid()) pts.emplace_back(x, c(x) + (x == 1.0 ? 0.01 : 0.0));
  bumped[1][0] = MonotoneCurve::piecewise_linear(pts);
  Representation bad(rep.space_ptr(), p_star, UtilityField(rep.space_ptr(), bumped));
  auto no = check_relative_uniqueness(rep, bad);
  CHECK_FALSE(no.ok);
  CHECK(no.deviation >= 0.009);
  CHECK(no.deviation <= 0.011);

  std::vector<double> w(rep.measure().weights().begin(), rep.measure().weights().end());
  w[0] += w[1];
  w[1] = 0.0;
  if (rep.measure().weight(1) > 0.0) {
    Representation singular = Representation::unchecked(rep.space_ptr(), ProbabilityMeasure(w),
                                                        rep.field());
    auto s = check_relative_uniqueness(rep, singular);
    CHECK_FALSE(s.ok);
    CHECK(s.witness_state == std::optional<std::size_t>(1));
  }
}
