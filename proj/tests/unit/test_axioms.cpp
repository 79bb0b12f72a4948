#include <doctest.h>

#include <map>

#include "itp/axioms.hpp"
#include "itp/errors.hpp"
#include "unit/fixtures.hpp"

using namespace itp;

namespace {

/// a, b, c, d with t1 = {a,b} | {c} | {d}; three atoms at t1 are needed for
/// the sure-thing principle to separate additive from non-additive levels.
Representation base_rep() {
  auto sp = std::make_shared<const FilteredSpace>(FilteredSpace::from_ids(
      {"a", "b", "c", "d"}, {0, 1, 2},
      {{{"a", "b", "c", "d"}}, {{"a", "b"}, {"c"}, {"d"}}, {{"a"}, {"b"}, {"c"}, {"d"}}}));
  auto id = MonotoneCurve::identity();
  auto pl = MonotoneCurve::piecewise_linear({{-1, -2}, {0, 0}, {1, 0.5}});
  UtilityField u(sp, {{id},
                      {MonotoneCurve::linear(2), MonotoneCurve::power(0.8), id},
                      {id, pl, MonotoneCurve::exponential(0.5), pl}});
  return Representation(sp, ProbabilityMeasure({0.2, 0.3, 0.3, 0.2}), u);
}

std::map<std::string, bool> verdicts(const PreferenceOracle& oracle, std::size_t level) {
  AxiomChecker checker(oracle);
  std::map<std::string, bool> out;
  out["T"] = checker.check_T(level).pass();
  out["M"] = checker.check_M(level).pass();
  out["ST"] = checker.check_ST(level).pass();
  bool c = true;
  for (const char* style : {"shift", "atomwise", "random"}) {
    c = c && checker.check_C_grid(level, style).pass();
  }
  out["C"] = c;
  return out;
}

}  // namespace

TEST_CASE("grid acts respect depth and measurability") {
  auto sp = fixtures::three_states();
  ActGrid g{{-1, 0, 1}, 2};
  auto acts = grid_acts(*sp, 1, g);
  CHECK(acts.size() == 9);
  auto deep = grid_acts(*sp, 2, g);
  CHECK(deep.size() == 21);
  for (const auto& a : deep) CHECK(is_measurable(*sp, 2, a));
  CHECK_THROWS_AS((ActGrid{{1, 2}, 2}.validate()), InvariantError);
  CHECK_THROWS_AS((ActGrid{{0, -1}, 2}.validate()), InvariantError);
}

TEST_CASE("induced oracle satisfies every axiom at both levels") {
  auto rep = base_rep();
  InducedOracle oracle(rep);
  for (std::size_t i = 0; i < 2; ++i) {
    auto v = verdicts(oracle, i);
    for (const auto& [name, pass] : v) {
      INFO("level " << i << " axiom " << name);
      CHECK(pass);
    }
  }
}

TEST_CASE("oracle bounds bracket the cce") {
  auto rep = base_rep();
  InducedOracle oracle(rep);
  AxiomChecker checker(oracle);
  Act f(2, {1.0, -0.5, 2.0, 0.5});
  auto b = checker.bounds(1, f);
  Act exact = cce(rep, 1, 2, f);
  auto atoms = exact.atom_values(rep.space());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    CHECK(b.lower[k] == doctest::Approx(atoms[k]).epsilon(1e-9));
    CHECK(b.upper[k] == doctest::Approx(atoms[k]).epsilon(1e-9));
  }
}

TEST_CASE("null events come from the oracle") {
  auto sp = fixtures::three_states();
  auto rep = fixtures::uniform_rep(sp, {0.0, 0.4, 0.6}, MonotoneCurve::identity());
  InducedOracle oracle(rep);
  auto nulls = derive_null_events(oracle, 2);
  CHECK(nulls.atoms == std::vector<std::size_t>{0});
  CHECK(derive_null_events(oracle, 1).atoms.empty());
}

TEST_CASE("each fault breaks exactly its target") {
  auto rep = base_rep();
  for (auto kind : {FaultKind::Intransitive, FaultKind::Degenerate, FaultKind::FlatSegment,
                    FaultKind::NonAdditive, FaultKind::Jump}) {
    auto oracle = make_fault_oracle(kind, rep, 0);
    auto v = verdicts(*oracle, 0);
    for (const auto& [name, pass] : v) {
      INFO("fault " << to_string(kind) << " axiom " << name);
      CHECK(pass == (name != fault_target(kind)));
    }
  }
}

TEST_CASE("report text names clause and status") {
  InducedOracle oracle(base_rep());
  AxiomChecker checker(oracle);
  auto r = checker.check_M(0);
  auto text = r.to_text();
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("(i=0)") != std::string::npos);
}
