#include "itp/demos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "itp/errors.hpp"

namespace itp {

namespace {

Rational exact(std::string_view text) { return *parse_rational(text); }

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string atom_list(const FilteredSpace& space, std::size_t i, const Event& e) {
  std::string out;
  for (auto k : space.atoms_in(i, e)) {
    if (!out.empty()) out += " ";
    out += space.describe_atom(i, k);
  }
  return out.empty() ? "(none)" : out;
}

std::string values_text(const FilteredSpace& space, const Act& a) { return describe(space, a); }

}  // namespace

ScenarioSpec villa_scenario() {
  ScenarioSpec spec;
  spec.name = "villa";
  spec.variant = "paper-arithmetic";
  spec.note = "cash 1e6 at t0 or the villa at t2; A = default at t1, D = default at t2";
  spec.space = std::make_shared<const FilteredSpace>(FilteredSpace::from_ids(
      {"A", "AcD", "AcDc"}, {0, 1, 2},
      {{{"A", "AcD", "AcDc"}}, {{"A"}, {"AcD", "AcDc"}}, {{"A"}, {"AcD"}, {"AcDc"}}}));
  spec.measures.push_back(
      {"paper-arithmetic",
       ProbabilityMeasure(std::vector<Rational>{exact("11/101"), exact("9/10100000"),
                                                exact("8999991/10100000")})});
  spec.measures.push_back(
      {"paper-stated", ProbabilityMeasure(std::vector<Rational>{
                           exact("0.01"), exact("0.00000099"), exact("0.98999901")})});
  const auto u = MonotoneCurve::identity();
  const auto ut = MonotoneCurve::piecewise_linear({{-1, -2}, {0, 0}, {1, 0.5}});
  spec.field = UtilityField(spec.space, {{u}, {ut, u}, {ut, ut, u}});
  const auto& s = *spec.space;
  spec.acts.push_back({"cash", Act::constant(s, 0, 1e6)});
  spec.acts.push_back({"villa_t1", Act::from_atoms(s, 1, std::vector<double>{2e5, 1.11e6})});
  spec.acts.push_back(
      {"villa_t2", Act::from_atoms(s, 2, std::vector<double>{2e5, 2e5, 1.8e6})});
  return spec;
}

VillaReport run_villa(const ScenarioSpec& spec, std::string_view variant) {
  VillaReport r;
  r.variant = variant.empty() ? spec.variant : std::string(variant);
  const auto& space = *spec.space;
  const Representation rep = spec.representation(r.variant);
  if (rep.u0().kind() != CurveKind::Identity || !rep.u0().continuous() ||
      rep.u0().in_scale() != 1.0 || rep.u0().out_scale() != 1.0) {
    throw PreconditionError("the villa report needs u0 = identity");
  }
  const Act& cash = spec.act("cash");
  const Act& v1 = spec.act("villa_t1");
  const Act& v2 = spec.act("villa_t2");

  r.displayed_t1 = exact("1.11e6") * exact("0.9") + exact("0.5") * exact("2e5") * exact("0.01");
  r.displayed_t2 = exact("1.8e6") * (1 - exact("1e-2") - exact("1e-6")) +
                   exact("0.5") * exact("2e5") * (exact("1e-2") + exact("1e-6"));

  const auto& p = rep.measure();
  if (!p.exact()) throw PreconditionError("the villa report needs exact weights");
  auto u1 = rep.field().evaluate(1, v1.values());
  std::vector<Rational> u1_exact(u1.begin(), u1.end());
  r.t1_cce_exact = conditional_atom_values_exact(space, p, u1_exact, 0)[0];
  r.t1_cce = cce(rep, 0, 1, v1).on_atom(space, 0);

  const Representation stated = spec.representation("paper-stated");
  auto u2 = stated.field().evaluate(2, v2.values());
  r.t2_model = conditional_atom_values(space, stated.measure(), u2, 0)[0];
  r.t2_relative_gap = std::fabs(r.t2_model - to_double(r.displayed_t2)) / to_double(r.displayed_t2);

  r.t0_vs_t2 = compare(rep, 0, 2, cash, v2);
  r.t1_vs_t2 = compare(rep, 1, 2, cash, v2);

  std::ostringstream out;
  out << "villa example (variant " << r.variant << ")\n";
  out << "measure:";
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    out << " " << space.state_id(s) << "=" << format_rational((*p.exact())[s]);
  }
  out << "\n";
  out << "t0 vs t2: displayed expected payoff 1.8e6*(1-1e-2-1e-6)+0.5*2e5*(1e-2+1e-6) = "
      << format_rational(r.displayed_t2) << "\n";
  out << "t0 vs t2: model E[u(t2,villa)] under paper-stated = " << format_number(r.t2_model)
      << " (relative gap " << format_number(r.t2_relative_gap) << ")\n";
  out << "t0 vs t2: cash at t0 vs villa at t2 -> " << to_string(r.t0_vs_t2.tag) << "\n";
  out << "t0 vs t1: displayed expected payoff 1.11e6*0.9+0.5*2e5*0.01 = "
      << format_rational(r.displayed_t1) << "\n";
  out << "t0 vs t1: model cce(t0, villa at t1) = " << format_rational(r.t1_cce_exact)
      << " exact, " << format_number(r.t1_cce) << " floating\n";
  out << "t1 vs t2: cash at t1 vs villa at t2 -> " << to_string(r.t1_vs_t2.tag) << "\n";
  out << "t1 vs t2: cash preferred on " << atom_list(space, 1, r.t1_vs_t2.parts.b) << "\n";
  out << "t1 vs t2: villa preferred on " << atom_list(space, 1, r.t1_vs_t2.parts.c) << "\n";
  out << "t1 vs t2: indifferent on " << atom_list(space, 1, r.t1_vs_t2.parts.a) << "\n";
  out << "policy: wait until t1; take the cash on " << atom_list(space, 1, r.t1_vs_t2.parts.b)
      << " and the villa at t2 on " << atom_list(space, 1, r.t1_vs_t2.parts.c) << "\n";
  r.text = out.str();
  return r;
}

// ------------------------------------------------------------ strategies

StrategySet::StrategySet(const ScenarioSpec& spec) : spec_(spec) {
  if (!spec.strategies) throw PreconditionError("scenario has no [strategies] section");
  const auto& st = *spec.strategies;
  if (st.fractions.empty()) throw PreconditionError("empty strategy set");
  const auto& space = *spec.space;
  for (std::size_t t = 0; t < space.last_time(); ++t) {
    for (std::size_t k = 0; k < space.num_atoms(t); ++k) slots_.emplace_back(t, k);
  }
  count_ = 1;
  for (std::size_t n = 0; n < slots_.size(); ++n) {
    count_ *= st.fractions.size();
    if (count_ > 100000) throw PreconditionError("more than 1e5 strategies");
  }
}

std::vector<std::size_t> StrategySet::choice(std::size_t strategy) const {
  const std::size_t base = spec_.strategies->fractions.size();
  std::vector<std::size_t> c(slots_.size());
  for (std::size_t n = slots_.size(); n-- > 0;) {
    c[n] = strategy % base;
    strategy /= base;
  }
  return c;
}

std::vector<Act> StrategySet::wealth(std::size_t strategy) const {
  const auto& space = *spec_.space;
  const auto& st = *spec_.strategies;
  auto c = choice(strategy);
  std::vector<Act> out{Act::constant(space, 0, st.wealth)};
  std::size_t slot = 0;
  for (std::size_t t = 0; t < space.last_time(); ++t) {
    const Act& s0 = spec_.act(st.price[t]);
    const Act& s1 = spec_.act(st.price[t + 1]);
    std::vector<double> x(space.num_states());
    for (std::size_t w = 0; w < x.size(); ++w) {
      const double a = st.fractions[c[slot + space.atom_of(t, w)]];
      x[w] = out.back()[w] * (1.0 + a * (s1[w] / s0[w] - 1.0));
    }
    slot += space.num_atoms(t);
    out.emplace_back(t + 1, std::move(x));
  }
  return out;
}

std::string StrategySet::label(std::size_t strategy) const {
  const auto& space = *spec_.space;
  auto c = choice(strategy);
  std::string out;
  for (std::size_t n = 0; n < slots_.size(); ++n) {
    if (n) out += " ";
    out += "t" + std::to_string(slots_[n].first) +
           space.describe_atom(slots_[n].first, slots_[n].second) + "=" +
           format_number(spec_.strategies->fractions[c[n]]);
  }
  return out;
}

std::size_t StrategySet::decisions_before(std::size_t t) const {
  std::size_t n = 0;
  for (const auto& s : slots_) n += s.first < t ? 1 : 0;
  return n;
}

// ------------------------------------------------------------------- dpp

DppReport run_dpp(const ScenarioSpec& spec, std::string_view variant, double tol) {
  const Representation rep = spec.representation(variant);
  const auto& space = rep.space();
  const std::size_t last = space.last_time();
  StrategySet set(spec);
  DppReport r;
  r.strategies = set.size();
  // expect[a][t] = E[u(N, V_N^a) | F_t] atom-wise
  std::vector<std::vector<std::vector<double>>> expect(set.size());
  std::vector<std::vector<std::size_t>> choices(set.size());
  for (std::size_t a = 0; a < set.size(); ++a) {
    auto x = set.wealth(a);
    auto u = rep.field().evaluate(last, x.back().values());
    for (std::size_t t = 0; t < last; ++t) {
      expect[a].push_back(conditional_atom_values(space, rep.measure(), u, t));
    }
    choices[a] = set.choice(a);
  }
  for (std::size_t a = 1; a < set.size(); ++a) {
    if (expect[a][0][0] > expect[r.optimal][0][0]) r.optimal = a;
  }
  r.optimal_label = set.label(r.optimal);
  r.dominance_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < last; ++t) {
    const std::size_t cut = set.decisions_before(t);
    const auto mass = rep.measure().atom_probabilities(space, t);
    std::map<std::vector<std::size_t>, std::vector<double>> best;
    for (std::size_t a = 0; a < set.size(); ++a) {
      std::vector<std::size_t> prefix(choices[a].begin(), choices[a].begin() + static_cast<long>(cut));
      auto [it, fresh] = best.try_emplace(prefix, expect[a][t]);
      if (!fresh) {
        for (std::size_t k = 0; k < it->second.size(); ++k) {
          it->second[k] = std::max(it->second[k], expect[a][t][k]);
        }
      }
    }
    for (std::size_t a = 0; a < set.size(); ++a) {
      std::vector<std::size_t> prefix(choices[a].begin(), choices[a].begin() + static_cast<long>(cut));
      const auto& v = best.at(prefix);
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (mass[k] == 0.0) continue;
        r.dominance_margin = std::min(r.dominance_margin, v[k] - expect[a][t][k]);
        if (a == r.optimal) {
          r.equality_gap = std::max(r.equality_gap, std::fabs(v[k] - expect[a][t][k]));
        }
      }
      if (a == r.optimal) r.v.push_back(Act::from_atoms(space, t, v));
    }
  }
  r.dominance = r.dominance_margin >= -tol;
  r.equality = r.equality_gap <= tol;
  std::ostringstream out;
  out << "dpp: " << r.strategies << " strategies over " << set.decisions() << " decisions\n";
  out << "optimal strategy: " << r.optimal_label << "\n";
  for (std::size_t t = 0; t < r.v.size(); ++t) {
    out << "v(t" << t << "): " << values_text(space, r.v[t]) << "\n";
  }
  out << "certainty equivalent of V_T(optimal) at t0: "
      << format_number(cce(rep, 0, last, set.wealth(r.optimal).back()).on_atom(space, 0)) << "\n";
  out << "dominance v >= E[u(V_T)|F_t] for every strategy (min margin "
      << format_number(r.dominance_margin) << "): " << pass_fail(r.dominance) << "\n";
  out << "equality at the optimum (max gap " << format_number(r.equality_gap)
      << "): " << pass_fail(r.equality) << "\n";
  r.text = out.str();
  return r;
}

// --------------------------------------------------------------- forward

ForwardReport run_forward_check(const ScenarioSpec& spec, std::string_view variant, double tol,
                                double deflate) {
  const Representation base = spec.representation(variant);
  const auto& space = base.space();
  const std::size_t last = space.last_time();
  UtilityField field = base.field();
  if (deflate != 1.0) {
    for (std::size_t k = 0; k < space.num_atoms(last); ++k) {
      field = field.with_curve(last, k, field.curve(last, k).scaled_output(deflate));
    }
  }
  const Representation rep(base.space_ptr(), base.measure(), field);
  StrategySet set(spec);
  ForwardReport r;
  std::vector<std::vector<Act>> paths;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t a = 0; a < set.size(); ++a) {
    paths.push_back(set.wealth(a));
    for (const auto& x : paths.back()) {
      for (double v : x.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  std::vector<double> grid;
  {
    const double a = lo > 0 ? 0.5 * lo : lo - 1.0;
    const double b = hi > 0 ? 2.0 * hi : hi + 1.0;
    for (int k = 0; k <= 32; ++k) grid.push_back(a + (b - a) * k / 32.0);
  }
  // (i)
  r.monotone_concave = true;
  std::string where;
  for (std::size_t t = 0; t <= last && r.monotone_concave; ++t) {
    for (std::size_t k = 0; k < space.num_atoms(t) && r.monotone_concave; ++k) {
      const auto& c = field.curve(t, k);
      for (std::size_t n = 1; n < grid.size(); ++n) {
        const double d1 = c(grid[n]) - c(grid[n - 1]);
        if (!(d1 > 0.0)) {
          r.monotone_concave = false;
          where = "not increasing at t" + std::to_string(t) + space.describe_atom(t, k);
          break;
        }
        if (n + 1 < grid.size()) {
          const double d2 = c(grid[n + 1]) - 2.0 * c(grid[n]) + c(grid[n - 1]);
          if (d2 > tol * std::max(1.0, std::fabs(c(grid[n])))) {
            r.monotone_concave = false;
            where = "not concave at t" + std::to_string(t) + space.describe_atom(t, k) +
                    " near x=" + format_number(grid[n]);
            break;
          }
        }
      }
    }
  }
  // (ii)
  const MonotoneCurve u0 = spec.strategies->initial_utility.value_or(rep.u0());
  double init_gap = 0.0;
  for (double x : grid) init_gap = std::max(init_gap, std::fabs(rep.u0()(x) - u0(x)));
  r.initial = init_gap <= tol;
  // (iii), (iv)
  r.supermartingale = true;
  double worst = -std::numeric_limits<double>::infinity();
  std::string worst_label;
  for (std::size_t a = 0; a < set.size(); ++a) {
    const auto& x = paths[a];
    double excess = -std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (std::size_t s = 0; s < last; ++s) {
      const auto mass = rep.measure().atom_probabilities(space, s);
      auto us = rep.field().evaluate(s, x[s].values());
      for (std::size_t t = s + 1; t <= last; ++t) {
        auto ut = rep.field().evaluate(t, x[t].values());
        auto e = conditional_atom_values(space, rep.measure(), ut, s);
        for (std::size_t k = 0; k < e.size(); ++k) {
          if (mass[k] == 0.0) continue;
          const double d = e[k] - us[space.atom_states(s, k).front()];
          excess = std::max(excess, d);
          gap = std::max(gap, std::fabs(d));
        }
      }
    }
    if (excess > worst) {
      worst = excess;
      worst_label = set.label(a);
    }
    if (excess > tol) r.supermartingale = false;
    if (gap <= tol) {
      ++r.optimal_count;
      if (!r.optimal) {
        r.optimal = a;
        r.optimal_label = set.label(a);
      }
    }
  }
  r.martingale = r.optimal.has_value();
  if (r.optimal) {
    r.equivalence = true;
    const auto& x = paths[*r.optimal];
    for (std::size_t s = 0; s < last; ++s) {
      for (std::size_t t = s + 1; t <= last; ++t) {
        if (compare(rep, s, t, x[s], x[t], tol).tag != VerdictTag::Equiv) r.equivalence = false;
      }
    }
  }
  std::ostringstream out;
  out << "forward performance check: " << set.size() << " strategies";
  if (deflate != 1.0) out << ", U at T scaled by " << format_number(deflate);
  out << "\n";
  out << "(i) monotone and concave on [" << format_number(grid.front()) << ", "
      << format_number(grid.back()) << "]: " << pass_fail(r.monotone_concave);
  if (!where.empty()) out << " (" << where << ")";
  out << "\n";
  out << "(ii) U(x, 0) = u0(x) (max gap " << format_number(init_gap)
      << "): " << pass_fail(r.initial) << "\n";
  out << "(iii) supermartingale along every strategy (max excess " << format_number(worst)
      << " at " << worst_label << "): " << pass_fail(r.supermartingale) << "\n";
  out << "(iv) martingale along some strategy (" << r.optimal_count << " of " << set.size()
      << "): " << pass_fail(r.martingale) << "\n";
  if (r.optimal) out << "optimal strategy: " << r.optimal_label << "\n";
  out << "X_s ~ X_t along the optimal strategy: " << pass_fail(r.equivalence) << "\n";
  r.text = out.str();
  return r;
}

}  // namespace itp
