#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "itp/axioms.hpp"
#include "itp/demos.hpp"
#include "itp/random_models.hpp"
#include "itp/recovery.hpp"
#include "itp/scenario.hpp"

using namespace itp;

namespace {

const std::filesystem::path kDir = ITP_SCENARIO_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

bool report(int n, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  bool pass = o.pass;
  std::ostringstream time;
  time.precision(3);
  time << std::fixed << secs << "s";
  if (limit_s > 0 && secs >= limit_s) {
    pass = false;
    o.detail += " (time limit " + format_number(limit_s) + "s exceeded)";
  }
  std::cout << "criterion " << n << ": " << (pass ? "PASS" : "FAIL") << "  " << name << "  "
            << o.detail << "  [" << time.str() << "]" << std::endl;
  return pass;
}

Outcome villa() {
  auto r = run_villa(villa_scenario(), "paper-arithmetic");
  const Event a = Event::of(3, {0});
  const Event ac = Event::of(3, {1, 2});
  const bool exact = r.t1_cce_exact == Rational(1000000);
  const bool gap = r.t2_relative_gap <= 1e-6;
  const bool verdicts = r.t1_vs_t2.parts.b.same_states(a) && r.t1_vs_t2.parts.c.same_states(ac) &&
                        r.t1_vs_t2.parts.a.empty();
  std::ostringstream d;
  d << "t1 cce=" << format_rational(r.t1_cce_exact) << " t2 gap=" << r.t2_relative_gap
    << " cash on A, villa on A^c: " << (verdicts ? "yes" : "no");
  return {exact && gap && verdicts, d.str()};
}

Outcome semigroup() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  std::size_t checks = 0;
  for (int n = 0; n < 200; ++n) {
    auto rep = random_representation(rng);
    const auto& sp = rep.space();
    for (std::size_t v = 2; v <= sp.last_time(); ++v) {
      Act f = random_act(sp, v, rng);
      for (std::size_t s = 0; s + 1 < v; ++s) {
        for (std::size_t t = s + 1; t < v; ++t) {
          worst = std::max(worst, semigroup_residual(rep, s, t, v, f));
          ++checks;
        }
      }
    }
  }
  std::ostringstream d;
  d << "200 reps, " << checks << " (s,t,v) triples, max residual " << worst;
  return {worst <= 1e-8, d.str()};
}

Outcome recovery() {
  std::mt19937_64 rng(77);
  RandomModelOptions opt;
  opt.piecewise_linear_only = true;
  opt.min_first_atoms = 3;
  std::size_t failures = 0;
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    auto rep = random_representation(rng, opt);
    InducedOracle oracle(rep);
    auto out = recover(oracle, rep.u0());
    auto u = check_relative_uniqueness(rep, out.rep, default_recovery_grid(), 1e-6);
    worst = std::max(worst, u.deviation);
    if (!u.ok) ++failures;
    std::mt19937_64 pairs(1000 + n);
    for (int q = 0; q < 500; ++q) {
      auto p = random_pair(rep, pairs);
      auto a = compare(rep, p.s, p.t, p.g, p.f);
      auto b = compare(out.rep, p.s, p.t, p.g, p.f, 1e-6);
      if (!same_partition(a, b)) ++mismatches;
    }
  }
  std::ostringstream d;
  d << "50 reps, uniqueness failures " << failures << " (max deviation " << worst
    << "), verdict mismatches " << mismatches << "/25000";
  return {failures == 0 && mismatches == 0, d.str()};
}

Outcome uniqueness_controls() {
  std::mt19937_64 rng(5);
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

  const std::size_t level = sp.last_time();
  const auto& c = curves[level][0];
  std::vector<std::pair<double, double>> pts;
  for (double x : default_recovery_grid()) pts.emplace_back(x, c(x) + (x == 1.0 ? 0.01 : 0.0));
  auto bumped = curves;
  bumped[level][0] = MonotoneCurve::piecewise_linear(pts);
  Representation bad(rep.space_ptr(), p_star, UtilityField(rep.space_ptr(), bumped));
  auto no = check_relative_uniqueness(rep, bad);

  std::ostringstream d;
  d << "(P*, delta u) deviation " << ok.deviation << "; perturbed deviation " << no.deviation
    << (no.ok ? " accepted" : " rejected");
  const bool pass = ok.ok && ok.deviation <= 1e-9 && !no.ok && no.deviation >= 0.009 &&
                    no.deviation <= 0.011;
  return {pass, d.str()};
}

Representation small_rep() {
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

std::size_t truncated_clauses(const AxiomReport& r) {
  std::size_t n = 0;
  for (const auto& c : r.clauses) n += c.truncated ? 1 : 0;
  return n;
}

std::map<std::string, bool> axiom_verdicts(const PreferenceOracle& oracle, std::size_t level,
                                           std::size_t& queries, std::size_t& truncated) {
  AxiomChecker checker(oracle);
  std::map<std::string, bool> out;
  auto record = [&](const AxiomReport& r) {
    truncated += truncated_clauses(r);
    return r.pass();
  };
  out["T"] = record(checker.check_T(level));
  out["M"] = record(checker.check_M(level));
  out["ST"] = record(checker.check_ST(level));
  bool c = true;
  for (const char* style : {"shift", "atomwise", "random"}) {
    c = record(checker.check_C_grid(level, style)) && c;
  }
  out["C"] = c;
  queries += checker.total_queries();
  return out;
}

Outcome axioms() {
  std::size_t queries = 0;
  std::vector<Representation> reps{small_rep()};
  std::mt19937_64 rng(11);
  RandomModelOptions opt;
  opt.max_states = 4;
  opt.min_periods = 2;
  opt.max_periods = 2;
  reps.push_back(random_representation(rng, opt));
  std::size_t induced_fail = 0;
  std::size_t truncated = 0;
  std::string induced;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    InducedOracle oracle(reps[r]);
    for (std::size_t i = 0; i < reps[r].space().last_time(); ++i) {
      for (const auto& [name, pass] : axiom_verdicts(oracle, i, queries, truncated)) {
        if (pass) continue;
        ++induced_fail;
        induced += " rep" + std::to_string(r) + ":" + name + ".i=" + std::to_string(i);
      }
    }
  }
  std::size_t fault_wrong = 0;
  std::size_t fault_truncated = 0;
  std::string faults;
  for (auto kind : {FaultKind::Intransitive, FaultKind::Degenerate, FaultKind::FlatSegment,
                    FaultKind::NonAdditive, FaultKind::Jump}) {
    auto oracle = make_fault_oracle(kind, reps[0], 0);
    std::string failed;
    for (const auto& [name, pass] : axiom_verdicts(*oracle, 0, queries, fault_truncated)) {
      if (!pass) failed += (failed.empty() ? "" : ",") + name;
    }
    if (failed != fault_target(kind)) ++fault_wrong;
    faults += " " + to_string(kind) + "->" + (failed.empty() ? "none" : failed);
  }
  std::ostringstream d;
  d << "induced failures " << induced_fail << induced << ", truncated clauses " << truncated
    << "; faults:" << faults << " (truncated " << fault_truncated << "); queries " << queries;
  return {induced_fail == 0 && truncated == 0 && fault_wrong == 0, d.str()};
}

Outcome closed_form() {
  std::mt19937_64 rng(31);
  RandomModelOptions opt;
  auto shape = random_representation(rng, opt);
  const auto& sp = shape.space();
  Representation exp_rep(shape.space_ptr(), shape.measure(),
                         UtilityField::uniform(shape.space_ptr(), MonotoneCurve::exponential(1)));
  Representation id_rep(shape.space_ptr(), shape.measure(),
                        UtilityField::uniform(shape.space_ptr(), MonotoneCurve::identity()));
  double worst = 0.0;
  bool identity_exact = true;
  for (int n = 0; n < 100; ++n) {
    const std::size_t t = 1 + rng() % sp.last_time();
    const std::size_t s = rng() % t;
    Act f = random_act(sp, t, rng);
    Act c = cce(exp_rep, s, t, f);
    std::vector<double> e(sp.num_states());
    for (std::size_t w = 0; w < e.size(); ++w) e[w] = std::exp(-f[w]);
    auto ce = conditional_expectation(sp, shape.measure(), Act(t, e), s).value;
    for (std::size_t w = 0; w < e.size(); ++w) {
      if (shape.measure().weight(w) == 0.0) continue;
      worst = std::max(worst, std::abs(c[w] + std::log(ce[w])));
    }
    Act ci = cce(id_rep, s, t, f);
    auto ei = conditional_expectation(sp, shape.measure(), f, s).value;
    if (!(ci == ei)) identity_exact = false;
  }
  std::ostringstream d;
  d << "exp max error " << worst << "; identity exact: " << (identity_exact ? "yes" : "no");
  return {worst <= 1e-10 && identity_exact, d.str()};
}

Outcome star_continuity() {
  auto sp = std::make_shared<const FilteredSpace>(FilteredSpace::from_ids(
      {"a", "b", "c"}, {0, 1, 2}, {{{"a", "b", "c"}}, {{"a", "b"}, {"c"}}, {{"a"}, {"b"}, {"c"}}}));
  auto id = MonotoneCurve::identity();
  UtilityField jumpy(sp, {{id}, {id, id}, {id, id.with_jump({0.5, 0.0, 0.3}), id}});
  ProbabilityMeasure positive({0.2, 0.3, 0.5});
  ProbabilityMeasure null_b({0.5, 0.0, 0.5});
  auto flagged = is_star_continuous(jumpy, positive);
  bool witness = false;
  if (!flagged.star_continuous && flagged.witness) {
    auto d = discontinuity_sets(jumpy, *flagged.witness_time, *flagged.witness);
    witness = positive.probability(d.any) > 0.0;
  }
  const bool null_ok = is_star_continuous(jumpy, null_b).star_continuous;
  std::mt19937_64 rng(3);
  bool continuous_ok = true;
  for (int n = 0; n < 20; ++n) {
    auto rep = random_representation(rng);
    continuous_ok = continuous_ok && is_star_continuous(rep.field(), rep.measure()).star_continuous;
  }
  std::ostringstream d;
  d << "positive-atom jump flagged with witness: " << (witness ? "yes" : "no")
    << "; null-atom jump passes: " << (null_ok ? "yes" : "no")
    << "; continuous fields pass: " << (continuous_ok ? "yes" : "no");
  return {witness && null_ok && continuous_ok, d.str()};
}

Outcome dpp() {
  auto spec = load_scenario(kDir / "binomial.sdu");
  auto r = run_dpp(spec, {}, 1e-9);
  std::ostringstream d;
  d << r.strategies << " strategies, min margin " << r.dominance_margin << ", equality gap "
    << r.equality_gap << ", optimum " << r.optimal_label;
  return {r.dominance && r.equality && r.equality_gap <= 1e-9, d.str()};
}

Outcome transforms() {
  std::mt19937_64 rng(8);
  auto rep = random_representation(rng);
  auto same = discount_transform(rep, rep.measure(), 1, 100);
  double beta_dev = 0.0;
  for (const auto& b : same.beta) {
    for (double x : b.values()) beta_dev = std::max(beta_dev, std::abs(x - 1.0));
  }
  auto other = discount_transform(rep, random_equivalent(rep.measure(), rng), 2, 100);
  std::vector<Act> numeraire;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (std::size_t t = 0; t < rep.space().num_times(); ++t) {
    std::vector<double> v(rep.space().num_atoms(t));
    for (auto& x : v) x = u(rng);
    numeraire.push_back(Act::from_atoms(rep.space(), t, v));
  }
  auto num = numeraire_transform(rep, numeraire, 3, 100);
  std::ostringstream d;
  d << "discount flips " << other.flips << "/" << other.pairs << ", numeraire flips " << num.flips
    << "/" << num.pairs << ", |beta - 1| under P*=P " << beta_dev;
  const bool pass = other.flips == 0 && other.pairs == 100 && num.flips == 0 &&
                    num.pairs == 100 && beta_dev <= 1e-12 && same.flips == 0;
  return {pass, d.str()};
}

}  // namespace

int main() {
  bool ok = true;
  ok = report(1, "villa", 1.0, villa) && ok;
  ok = report(2, "semigroup", 30.0, semigroup) && ok;
  ok = report(3, "recovery", 120.0, recovery) && ok;
  ok = report(4, "uniqueness controls", 0.0, uniqueness_controls) && ok;
  ok = report(5, "axioms", 60.0, axioms) && ok;
  ok = report(6, "closed form", 0.0, closed_form) && ok;
  ok = report(7, "star-continuity", 0.0, star_continuity) && ok;
  ok = report(8, "dpp", 0.0, dpp) && ok;
  ok = report(9, "transforms", 0.0, transforms) && ok;
  return ok ? 0 : 1;
}
