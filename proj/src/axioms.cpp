#include "itp/axioms.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "itp/errors.hpp"

namespace itp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
/// Outcome-scale slack under which two constants count as tied.
constexpr double kTieSlack = 1e-6;
constexpr std::size_t kMemoLimit = 4000000;

double slack_at(double x) { return kTieSlack * std::max(1.0, std::fabs(x)); }

struct BudgetExhausted {};

Act atom_constant(const FilteredSpace& space, std::size_t i, std::size_t atom, double a) {
  std::vector<double> v(space.num_states(), 0.0);
  for (auto s : space.atom_states(i, atom)) v[s] = a;
  return Act(i, std::move(v));
}

Event event_of_mask(const FilteredSpace& space, std::size_t i, std::uint64_t mask) {
  std::vector<std::size_t> list;
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    if (mask >> k & 1U) list.push_back(k);
  }
  return space.union_of(i, list);
}

/// Calls fn(values) for every assignment of grid values to `count` slots.
template <typename Fn>
void for_each_assignment(std::size_t count, const std::vector<double>& values, Fn&& fn) {
  std::vector<std::size_t> idx(count, 0);
  std::vector<double> cur(count, values.empty() ? 0.0 : values[0]);
  while (true) {
    fn(cur);
    std::size_t pos = count;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < values.size()) {
        cur[pos] = values[idx[pos]];
        break;
      }
      idx[pos] = 0;
      cur[pos] = values[0];
      if (pos == 0) return;
    }
    if (count == 0) return;
  }
}

struct Classes {
  std::vector<std::size_t> id;
  std::vector<std::size_t> representatives;
};

std::size_t distinct_values(std::span<const double> v) {
  return std::set<double>(v.begin(), v.end()).size();
}

/// Groups acts by their restriction to `a`.
Classes restricted_classes(const std::vector<Act>& acts, const Event& a) {
  Classes c;
  std::map<std::vector<double>, std::size_t> seen;
  c.id.reserve(acts.size());
  for (std::size_t n = 0; n < acts.size(); ++n) {
    Act r = restrict(acts[n], a);
    std::vector<double> key(r.values().begin(), r.values().end());
    auto [it, fresh] = seen.emplace(std::move(key), c.representatives.size());
    if (fresh) c.representatives.push_back(n);
    c.id.push_back(it->second);
  }
  return c;
}

std::string act_text(const FilteredSpace& space, const Act& f) { return describe(space, f); }

ClauseResult make_clause(std::string id, std::string name) {
  ClauseResult c;
  c.id = std::move(id);
  c.name = std::move(name);
  return c;
}

}  // namespace

// --------------------------------------------------------------- oracles

InducedOracle::InducedOracle(Representation rep, double tol)
    : rep_(std::move(rep)), tol_(tol) {}

OracleAnswer InducedOracle::query(std::size_t i, const Act& g, const Act& f,
                                  const Event& a) const {
  const auto& space = rep_.space();
  if (i >= space.last_time()) throw PreconditionError("query level out of range");
  if (g.time_index() > i || f.time_index() > i + 1) {
    throw PreconditionError("query acts are not measurable at the right times");
  }
  auto u = rep_.field().evaluate(i + 1, restrict(f, a).values());
  auto target = conditional_atom_values(space, rep_.measure(), u, i);
  auto mass = rep_.measure().atom_probabilities(space, i);
  OracleAnswer out{true, true};
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (mass[k] == 0.0) continue;
    const std::size_t first = space.atom_states(i, k).front();
    const double gv = a.contains(first) ? g[first] : 0.0;
    const double d = rep_.field().curve(i, k)(gv) - target[k];
    const double band = tol_ * std::max(1.0, std::fabs(target[k]));
    if (d < -band) out.succeq = false;
    if (d > band) out.preceq = false;
  }
  return out;
}

FunctionalOracle::FunctionalOracle(Representation base, std::size_t level,
                                   LevelFunctional value, double band)
    : induced_(base), base_(std::move(base)), level_(level), value_(std::move(value)),
      band_(band) {}

OracleAnswer FunctionalOracle::query(std::size_t i, const Act& g, const Act& f,
                                     const Event& a) const {
  if (i != level_) return induced_.query(i, g, f, a);
  const auto& space = base_.space();
  Act h = restrict(f, a);
  auto mass = base_.measure().atom_probabilities(space, i);
  OracleAnswer out{true, true};
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    if (mass[k] == 0.0) continue;
    const std::size_t first = space.atom_states(i, k).front();
    const double gv = a.contains(first) ? g[first] : 0.0;
    const double d = base_.field().curve(i, k)(gv) - value_(k, h);
    if (d < -band_) out.succeq = false;
    if (d > band_) out.preceq = false;
  }
  return out;
}

DegenerateOracle::DegenerateOracle(Representation base, std::size_t level)
    : induced_(std::move(base)), level_(level) {}

OracleAnswer DegenerateOracle::query(std::size_t i, const Act& g, const Act& f,
                                     const Event& a) const {
  if (i != level_) return induced_.query(i, g, f, a);
  return {true, false};
}

std::string to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::Intransitive:
      return "intransitive";
    case FaultKind::Degenerate:
      return "degenerate";
    case FaultKind::FlatSegment:
      return "flat-segment";
    case FaultKind::NonAdditive:
      return "non-additive";
    case FaultKind::Jump:
      return "jump";
  }
  return "?";
}

std::string fault_target(FaultKind kind) {
  switch (kind) {
    case FaultKind::Intransitive:
    case FaultKind::Degenerate:
      return "T";
    case FaultKind::FlatSegment:
      return "M";
    case FaultKind::NonAdditive:
      return "ST";
    case FaultKind::Jump:
      return "C";
  }
  return "?";
}

std::unique_ptr<PreferenceOracle> make_fault_oracle(FaultKind kind,
                                                    const Representation& base,
                                                    std::size_t level) {
  const auto& space = base.space();
  if (level >= space.last_time()) throw PreconditionError("fault level out of range");
  const std::size_t next = level + 1;
  auto expect = [base, level](const std::vector<double>& values, std::size_t atom) {
    auto cond = conditional_atom_values(base.space(), base.measure(), values, level);
    return cond[atom];
  };
  switch (kind) {
    case FaultKind::Degenerate:
      return std::make_unique<DegenerateOracle>(base, level);
    case FaultKind::Intransitive:
      return std::make_unique<FunctionalOracle>(
          base, level,
          [base, next, expect](std::size_t atom, const Act& h) {
            return expect(base.field().evaluate(next, h.values()), atom);
          },
          1e-3);
    case FaultKind::FlatSegment:
      return std::make_unique<FunctionalOracle>(
          base, level, [base, next, expect](std::size_t atom, const Act& h) {
            auto u = base.field().evaluate(next, h.values());
            for (auto& x : u) x = x <= 0.5 ? x : (x <= 1.0 ? 0.5 : x - 0.5);
            return expect(u, atom);
          });
    case FaultKind::NonAdditive:
      return std::make_unique<FunctionalOracle>(
          base, level, [base, level, next, expect](std::size_t atom, const Act& h) {
            double top = -kInf;
            for (auto s : base.space().atom_states(level, atom)) top = std::max(top, h[s]);
            return expect(base.field().evaluate(next, h.values()), atom) + 0.5 * top;
          });
    case FaultKind::Jump: {
      const auto& target = space.atom_states(next, 0);
      std::vector<bool> jumpy(space.num_states(), false);
      for (auto s : target) jumpy[s] = true;
      MonotoneCurve jump_curve =
          base.field().curve(next, 0).with_jump(Jump{1.0, 0.25, 0.25});
      return std::make_unique<FunctionalOracle>(
          base, level,
          [base, next, expect, jumpy, jump_curve](std::size_t atom, const Act& h) {
            auto u = base.field().evaluate(next, h.values());
            for (std::size_t s = 0; s < u.size(); ++s) {
              if (jumpy[s]) u[s] = jump_curve(h[s]);
            }
            return expect(u, atom);
          });
    }
  }
  throw PreconditionError("unknown fault kind");
}

// ------------------------------------------------------------------ grid

void ActGrid::validate() const {
  if (values.empty()) throw InvariantError("grid is empty");
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k - 1] < values[k])) throw InvariantError("grid must be strictly sorted");
  }
  if (std::find(values.begin(), values.end(), 0.0) == values.end()) {
    throw InvariantError("grid must contain 0");
  }
  if (depth == 0) throw InvariantError("grid depth must be positive");
}

double ActGrid::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<Act> grid_acts(const FilteredSpace& space, std::size_t i, const ActGrid& grid) {
  grid.validate();
  const std::size_t m = space.num_atoms(i);
  double total = std::pow(static_cast<double>(grid.values.size()), static_cast<double>(m));
  if (total > 2e6) {
    throw PreconditionError("grid acts at t=" + std::to_string(i) + " exceed 2e6 candidates");
  }
  std::vector<Act> out;
  for_each_assignment(m, grid.values, [&](const std::vector<double>& v) {
    std::set<double> distinct(v.begin(), v.end());
    if (distinct.size() <= grid.depth) out.push_back(Act::from_atoms(space, i, v));
  });
  return out;
}

// ---------------------------------------------------------------- report

bool AxiomReport::pass() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ClauseResult& c) { return c.pass; });
}

std::string AxiomReport::to_text() const {
  std::ostringstream out;
  for (const auto& c : clauses) {
    out << "[" << c.id << "] " << c.name << " (i=" << level << "): "
        << (c.pass ? "PASS" : "FAIL") << "  queries=" << c.queries;
    if (c.truncated) out << "  truncated";
    out << "\n";
    if (!c.detail.empty()) out << "    " << c.detail << "\n";
    if (!c.counterexample.empty()) out << "    counterexample: " << c.counterexample << "\n";
  }
  return out.str();
}

std::vector<double> CceBounds::mid() const {
  std::vector<double> out(lower.size(), 0.0);
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (std::isfinite(lower[k]) && std::isfinite(upper[k])) {
      out[k] = lower[k] + 0.5 * (upper[k] - lower[k]);
    } else if (std::isfinite(lower[k])) {
      out[k] = lower[k];
    } else if (std::isfinite(upper[k])) {
      out[k] = upper[k];
    }
  }
  return out;
}

// --------------------------------------------------------------- checker

struct AxiomChecker::Budget {
  std::size_t used = 0;
  std::size_t cap = 0;
};

AxiomChecker::AxiomChecker(const PreferenceOracle& oracle, ActGrid grid,
                           std::size_t query_cap)
    : oracle_(oracle), grid_(std::move(grid)), cap_(query_cap) {
  grid_.validate();
}

OracleAnswer AxiomChecker::ask(Budget& budget, std::size_t i, const Act& g, const Act& f,
                               const Event& a) {
  // the oracle sees only g 1_A and f 1_A, so proper events are memoized
  const bool proper = a.count() < a.num_states();
  std::string key;
  if (proper) {
    key.reserve(16 + 16 * a.num_states());
    auto put = [&key](const auto& x) {
      key.append(reinterpret_cast<const char*>(&x), sizeof(x));
    };
    put(i);
    for (std::size_t s = 0; s < a.num_states(); ++s) {
      const bool in = a.contains(s);
      key.push_back(in ? '1' : '0');
      if (in) {
        put(g[s]);
        put(f[s]);
      }
    }
    if (auto it = answers_.find(key); it != answers_.end()) {
      return {(it->second & 1) != 0, (it->second & 2) != 0};
    }
  }
  if (budget.used >= budget.cap) throw BudgetExhausted{};
  ++budget.used;
  ++total_queries_;
  auto ans = oracle_.query(i, g, f, a);
  if (proper && answers_.size() < kMemoLimit) {
    answers_.emplace(std::move(key),
                     static_cast<std::uint8_t>((ans.succeq ? 1 : 0) | (ans.preceq ? 2 : 0)));
  }
  return ans;
}

const CceBounds& AxiomChecker::bounds(std::size_t i, const Act& f) {
  auto key = std::make_pair(i, std::vector<double>(f.values().begin(), f.values().end()));
  if (auto it = bounds_.find(key); it != bounds_.end()) return it->second;
  const auto& space = oracle_.space();
  Budget budget{0, std::numeric_limits<std::size_t>::max()};
  const std::size_t m = space.num_atoms(i);
  CceBounds b;
  b.lower.assign(m, 0.0);
  b.upper.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const Event ev = space.atom_event(i, k);
    AtomKey atom_key{i, k, {}};
    for (auto s : space.atom_states(i, k)) atom_key.values.push_back(f[s]);
    if (auto it = atom_bounds_.find(atom_key); it != atom_bounds_.end()) {
      b.lower[k] = it->second.first;
      b.upper[k] = it->second.second;
      continue;
    }
    double guess = 0.0;
    for (auto s : space.atom_states(i, k)) guess += f[s];
    guess /= static_cast<double>(space.atom_states(i, k).size());
    auto holds = [&](double a, bool upper_side) {
      auto ans = ask(budget, i, atom_constant(space, i, k, a), f, ev);
      return upper_side ? ans.preceq : ans.succeq;
    };
    // lower: {a : a >= f} is an up-set; upper: {a : a <= f} is a down-set.
    for (int side = 0; side < 2; ++side) {
      const bool upper_side = side == 1;
      // yes-region lies above for the lower bound and below for the upper one
      const double dir = upper_side ? -1.0 : 1.0;
      double yes;
      double no;
      if (holds(guess, upper_side)) {
        yes = guess;
        double step = 1.0;
        bool found = false;
        for (int e = 0; e < 64; ++e) {
          const double cand = yes - dir * step;
          if (!holds(cand, upper_side)) {
            no = cand;
            found = true;
            break;
          }
          yes = cand;
          step *= 2.0;
        }
        if (!found) {
          (upper_side ? b.upper : b.lower)[k] = upper_side ? kInf : -kInf;
          continue;
        }
      } else {
        no = guess;
        double step = 1.0;
        bool found = false;
        for (int e = 0; e < 64; ++e) {
          const double cand = no + dir * step;
          if (holds(cand, upper_side)) {
            yes = cand;
            found = true;
            break;
          }
          no = cand;
          step *= 2.0;
        }
        if (!found) {
          (upper_side ? b.upper : b.lower)[k] = upper_side ? -kInf : kInf;
          continue;
        }
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = no + 0.5 * (yes - no);
        if (mid == no || mid == yes) break;
        if (holds(mid, upper_side)) {
          yes = mid;
        } else {
          no = mid;
        }
      }
      (upper_side ? b.upper : b.lower)[k] = yes;
    }
    atom_bounds_.emplace(std::move(atom_key), std::make_pair(b.lower[k], b.upper[k]));
  }
  return bounds_.emplace(std::move(key), std::move(b)).first->second;
}

NullFamily derive_null_events(const PreferenceOracle& oracle, std::size_t j,
                              const ActGrid& grid) {
  AxiomChecker checker(oracle, grid);
  return checker.null_family(j);
}

const NullFamily& AxiomChecker::null_family(std::size_t j) {
  if (auto it = nulls_.find(j); it != nulls_.end()) return it->second;
  const auto& space = oracle_.space();
  space.check_time(j);
  NullFamily fam;
  if (j == 0) {
    fam.maximal = Event::none(space.num_states()).with_time(0);
    return nulls_.emplace(j, std::move(fam)).first->second;
  }
  const std::size_t i = j - 1;
  Budget budget{0, std::numeric_limits<std::size_t>::max()};
  const Event omega = Event::all(space.num_states()).with_time(i);
  auto fs = grid_acts(space, j, grid_);
  auto gts = grid_acts(space, i, grid_);
  std::vector<bool> candidate(space.num_atoms(j), true);
  for (const auto& f : fs) {
    if (std::none_of(candidate.begin(), candidate.end(), [](bool c) { return c; })) break;
    Act g = Act::from_atoms(space, i, bounds(i, f).mid());
    if (!ask(budget, i, g, f, omega).equiv()) continue;
    for (std::size_t h = 0; h < candidate.size(); ++h) {
      if (!candidate[h]) continue;
      const Event ev = space.atom_event(j, h);
      for (const auto& gt : gts) {
        Act mixed = paste(gt.at_time(j), f, ev);
        if (!ask(budget, i, g, mixed, omega).equiv()) {
          candidate[h] = false;
          break;
        }
      }
    }
  }
  for (std::size_t h = 0; h < candidate.size(); ++h) {
    if (candidate[h]) fam.atoms.push_back(h);
  }
  fam.maximal = space.union_of(j, fam.atoms);
  return nulls_.emplace(j, std::move(fam)).first->second;
}

std::vector<Event> AxiomChecker::essential_events(std::size_t j) {
  const auto& space = oracle_.space();
  const auto& fam = null_family(j);
  const std::size_t m = space.num_atoms(j);
  if (m > 20) throw PreconditionError("too many atoms for event enumeration");
  std::vector<Event> out;
  // singletons first, then larger unions in mask order
  std::vector<std::uint64_t> masks;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint64_t a, std::uint64_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (auto mask : masks) {
    Event e = event_of_mask(space, j, mask);
    if (!fam.is_null(e)) out.push_back(e);
  }
  return out;
}

bool AxiomChecker::strictly(Budget& budget, std::size_t i, const Act& g, const Act& f,
                            const Event& b, bool below) {
  // g <^B f (below) or g >^B f: weak relation on B, no equivalence on any
  // essential B' inside B.
  auto ans = ask(budget, i, g, f, b);
  if (below ? !ans.preceq : !ans.succeq) return false;
  for (const auto& sub : essential_events(i)) {
    if (!sub.subset_of(b)) continue;
    if (ask(budget, i, g, f, sub).equiv()) return false;
  }
  return true;
}

AxiomReport AxiomChecker::check_T(std::size_t i) {
  const auto& space = oracle_.space();
  if (i >= space.last_time()) throw PreconditionError("level out of range");
  AxiomReport report;
  report.axiom = "T";
  report.level = i;
  const std::size_t m = space.num_atoms(i);
  const std::uint64_t num_events = std::uint64_t{1} << m;
  const auto& nulls = null_family(i);
  auto gs = grid_acts(space, i, grid_);
  auto fs = grid_acts(space, i + 1, grid_);
  const bool unconditioned = i == 0;
  auto id = [&](int n) {
    return unconditioned ? "T.0." + std::to_string(n) : "T.i." + std::to_string(n);
  };

  // answers[g][f][event mask]: bit 0 succeq, bit 1 preceq
  std::vector<std::uint8_t> answers(gs.size() * fs.size() * num_events, 0);
  auto at = [&](std::size_t g, std::size_t f, std::uint64_t e) -> std::uint8_t& {
    return answers[(g * fs.size() + f) * num_events + e];
  };
  std::vector<Event> events;
  for (std::uint64_t e = 0; e < num_events; ++e) events.push_back(event_of_mask(space, i, e));

  ClauseResult complete = make_clause(id(1), unconditioned ? "completeness" : "local completeness");
  Budget table{0, cap_};
  bool table_ok = true;
  try {
    for (std::uint64_t e = 0; e < num_events; ++e) {
      if (unconditioned && e != num_events - 1) continue;
      // a query only sees g 1_A and f 1_A
      auto gc = restricted_classes(gs, events[e]);
      auto fc = restricted_classes(fs, events[e]);
      std::vector<std::uint8_t> cls(gc.representatives.size() * fc.representatives.size(), 0);
      for (std::size_t a = 0; a < gc.representatives.size(); ++a) {
        for (std::size_t b = 0; b < fc.representatives.size(); ++b) {
          auto ans = ask(table, i, gs[gc.representatives[a]], fs[fc.representatives[b]],
                         events[e]);
          cls[a * fc.representatives.size() + b] =
              static_cast<std::uint8_t>((ans.succeq ? 1 : 0) | (ans.preceq ? 2 : 0));
        }
      }
      for (std::size_t g = 0; g < gs.size(); ++g) {
        for (std::size_t f = 0; f < fs.size(); ++f) {
          at(g, f, e) = cls[gc.id[g] * fc.representatives.size() + fc.id[f]];
        }
      }
    }
  } catch (const BudgetExhausted&) {
    table_ok = false;
  }
  complete.queries = table.used;
  complete.truncated = !table_ok;

  std::vector<std::uint64_t> essential;
  for (std::uint64_t e = 1; e < num_events; ++e) {
    if (!nulls.is_null(events[e])) essential.push_back(e);
  }
  const std::uint64_t omega = num_events - 1;

  // 1. (local) completeness
  for (std::size_t g = 0; g < gs.size() && complete.pass && table_ok; ++g) {
    for (std::size_t f = 0; f < fs.size() && complete.pass; ++f) {
      bool ok = false;
      if (unconditioned) {
        ok = at(g, f, omega) != 0;
      } else {
        for (auto e : essential) ok = ok || at(g, f, e) != 0;
      }
      if (!ok) {
        complete.pass = false;
        complete.counterexample = "g: " + act_text(space, gs[g]) + " | f: " +
                                  act_text(space, fs[f]) +
                                  (essential.empty() ? " (no essential event)" : "");
      }
    }
  }
  report.clauses.push_back(complete);

  // 2. transitivity: grid pairs plus a bisection probe per atom
  ClauseResult trans = make_clause(id(2), "transitivity");
  Budget tb{0, cap_};
  try {
    for (std::size_t f = 0; f < fs.size() && trans.pass; ++f) {
      for (std::size_t g = 0; g < gs.size() && trans.pass; ++g) {
        if (!(at(g, f, omega) & 1)) continue;
        for (std::size_t h = 0; h < gs.size(); ++h) {
          if (!(at(h, f, omega) & 2)) continue;
          std::vector<std::size_t> below;
          for (std::size_t k = 0; k < m; ++k) {
            const double gv = gs[g].on_atom(space, k);
            const double hv = gs[h].on_atom(space, k);
            if (gv < hv - slack_at(hv)) below.push_back(k);
          }
          Event lt = space.union_of(i, below);
          if (!nulls.is_null(lt)) {
            trans.pass = false;
            trans.counterexample = "g >= f and h <= f with {g<h}=" + space.describe(lt) +
                                   " essential; g: " + act_text(space, gs[g]) +
                                   " | h: " + act_text(space, gs[h]) +
                                   " | f: " + act_text(space, fs[f]);
            break;
          }
        }
      }
    }
    for (std::size_t f = 0; f < fs.size() && trans.pass; ++f) {
      const auto before = total_queries_;
      const CceBounds& b = bounds(i, fs[f]);
      tb.used += total_queries_ - before;
      for (std::size_t k = 0; k < m && trans.pass; ++k) {
        if (nulls.is_null_atom(k)) continue;
        const double lo = b.lower[k];
        const double up = b.upper[k];
        if (!std::isfinite(lo) || !std::isfinite(up)) continue;
        if (up - lo <= slack_at(up)) continue;
        const Event ev = space.atom_event(i, k);
        Act fk = restrict(fs[f], ev);
        Act g = atom_constant(space, i, k, lo);
        Act h = atom_constant(space, i, k, up);
        const Event all = Event::all(space.num_states()).with_time(i);
        if (ask(tb, i, g, fk, all).succeq && ask(tb, i, h, fk, all).preceq) {
          trans.pass = false;
          trans.counterexample = "g=" + format_number(lo) + " >= f and h=" + format_number(up) +
                                 " <= f on " + space.describe_atom(i, k) +
                                 " with g < h; f: " + act_text(space, fs[f]);
        }
      }
    }
  } catch (const BudgetExhausted&) {
    trans.truncated = true;
  }
  trans.queries = tb.used;
  report.clauses.push_back(trans);

  // 3. normalization
  ClauseResult norm = make_clause(id(3), "normalization");
  Budget nb{0, cap_};
  {
    std::vector<Event> null_events_list;
    std::vector<std::size_t> null_atoms = nulls.atoms;
    const std::size_t nn = null_atoms.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nn); ++mask) {
      std::vector<std::size_t> sel;
      for (std::size_t k = 0; k < nn; ++k) {
        if (mask >> k & 1U) sel.push_back(null_atoms[k]);
      }
      null_events_list.push_back(space.union_of(i, sel));
    }
    const Event all = Event::all(space.num_states()).with_time(i);
    try {
      for (const auto& a : null_events_list) {
        for (const auto& b : null_events_list) {
          if (!norm.pass) break;
          Act ga = Act::indicator(a, i);
          Act fb = Act::indicator(b, i).at_time(i + 1);
          if (!ask(nb, i, ga, fb, all).equiv()) {
            norm.pass = false;
            norm.counterexample = "1_" + space.describe(a) + " not ~ 1_" + space.describe(b);
          }
        }
      }
    } catch (const BudgetExhausted&) {
      norm.truncated = true;
    }
  }
  norm.queries = nb.used;
  report.clauses.push_back(norm);

  // 4. non-degeneracy within the extended hull
  ClauseResult nondeg = make_clause(id(4), "non-degeneracy");
  Budget db{0, cap_};
  const double ext = grid_.max_abs() * 5.0;
  nondeg.detail = "not falsified within bounds [" + format_number(-ext) + ", " +
                  format_number(ext) + "]; unbounded search is undecidable";
  try {
    const Event all = Event::all(space.num_states()).with_time(i);
    std::vector<std::size_t> constant_idx;
    for (std::size_t g = 0; g < gs.size(); ++g) {
      auto v = gs[g].atom_values(space);
      if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
        constant_idx.push_back(g);
      }
    }
    Act lo = Act::constant(space, i, -ext);
    Act hi = Act::constant(space, i, ext);
    for (std::size_t f = 0; f < fs.size() && nondeg.pass; ++f) {
      bool below = false;
      bool above = false;
      for (auto g : constant_idx) {
        below = below || (at(g, f, omega) & 2);
        above = above || (at(g, f, omega) & 1);
      }
      if (!below) below = ask(db, i, lo, fs[f], all).preceq;
      if (!above) above = ask(db, i, hi, fs[f], all).succeq;
      if (!below || !above) {
        nondeg.pass = false;
        nondeg.detail = "no constant in [" + format_number(-ext) + ", " + format_number(ext) +
                        "] is " + (below ? ">= f" : "<= f") +
                        "; unbounded search is undecidable";
        nondeg.counterexample = "f: " + act_text(space, fs[f]);
      }
    }
  } catch (const BudgetExhausted&) {
    nondeg.truncated = true;
  }
  nondeg.queries = db.used;
  report.clauses.push_back(nondeg);

  if (!unconditioned) {
    ClauseResult cons = make_clause(id(5), "consistency");
    ClauseResult stab = make_clause(id(6), "stability");
    cons.detail = "reuses the local-completeness answer table";
    stab.detail = cons.detail;
    for (std::size_t g = 0; g < gs.size() && table_ok; ++g) {
      for (std::size_t f = 0; f < fs.size(); ++f) {
        for (std::uint64_t a = 0; a < num_events; ++a) {
          const auto ra = at(g, f, a);
          for (std::uint64_t b = 0; b < num_events; ++b) {
            const auto rb = at(g, f, b);
            if (cons.pass && (b & ~a) == 0) {
              const std::uint8_t missing = static_cast<std::uint8_t>(ra & ~rb);
              if (missing) {
                cons.pass = false;
                cons.counterexample = std::string(missing & 1 ? ">=" : "<=") + " holds on " +
                                      space.describe(events[a]) + " but not on " +
                                      space.describe(events[b]) +
                                      "; g: " + act_text(space, gs[g]) +
                                      " | f: " + act_text(space, fs[f]);
              }
            }
            if (stab.pass) {
              const auto ru = at(g, f, a | b);
              const std::uint8_t missing = static_cast<std::uint8_t>(ra & rb & ~ru);
              if (missing) {
                stab.pass = false;
                stab.counterexample = std::string(missing & 1 ? ">=" : "<=") + " holds on " +
                                      space.describe(events[a]) + " and " +
                                      space.describe(events[b]) + " but not on the union" +
                                      "; g: " + act_text(space, gs[g]) +
                                      " | f: " + act_text(space, fs[f]);
              }
            }
          }
        }
      }
    }
    cons.truncated = stab.truncated = !table_ok;
    report.clauses.push_back(cons);
    report.clauses.push_back(stab);
  }
  return report;
}

AxiomReport AxiomChecker::check_M(std::size_t i) {
  const auto& space = oracle_.space();
  if (i >= space.last_time()) throw PreconditionError("level out of range");
  AxiomReport report;
  report.axiom = "M";
  report.level = i;
  ClauseResult clause = make_clause(i == 0 ? "M.0" : "M.i", "strict monotonicity");
  Budget budget{0, cap_};
  const std::size_t j = i + 1;
  const std::size_t mi = space.num_atoms(i);
  const std::size_t mj = space.num_atoms(j);
  const auto& essential_next = essential_events(j);
  const auto essential_now = essential_events(i);
  const Event all = Event::all(space.num_states()).with_time(i);
  std::vector<std::pair<double, double>> steps;
  for (std::size_t a = 0; a < grid_.values.size(); ++a) {
    for (std::size_t b = a + 1; b < grid_.values.size(); ++b) {
      steps.emplace_back(grid_.values[a], grid_.values[b]);
    }
  }
  std::size_t combos = 0;
  try {
    for (const auto& A : essential_next) {
      if (!clause.pass) break;
      std::vector<std::size_t> outside;
      for (std::size_t h = 0; h < mj; ++h) {
        if (!A.contains(space.atom_states(j, h).front())) outside.push_back(h);
      }
      // only the atoms at i that meet A shape g1 1_A and g2 1_A
      std::vector<std::size_t> touched;
      for (std::size_t k = 0; k < mi; ++k) {
        if (!(space.atom_event(i, k) & A).empty()) touched.push_back(k);
      }
      for_each_assignment(outside.size(), grid_.values, [&](const std::vector<double>& vals) {
        if (!clause.pass) return;
        std::vector<double> fv(mj, 0.0);
        for (std::size_t q = 0; q < outside.size(); ++q) fv[outside[q]] = vals[q];
        Act f = Act::from_atoms(space, j, fv);
        std::vector<std::size_t> idx(touched.size(), 0);
        for (bool more = true; more && clause.pass;) {
          std::vector<double> v1(mi, steps.front().first);
          std::vector<double> v2(mi, steps.front().second);
          for (std::size_t q = 0; q < touched.size(); ++q) {
            v1[touched[q]] = steps[idx[q]].first;
            v2[touched[q]] = steps[idx[q]].second;
          }
          more = false;
          for (std::size_t q = 0; q < idx.size(); ++q) {
            if (++idx[q] < steps.size()) {
              more = true;
              break;
            }
            idx[q] = 0;
          }
          Act g1 = Act::from_atoms(space, i, v1);
          Act g2 = Act::from_atoms(space, i, v2);
          Act x1 = paste(g1.at_time(j), f, A);
          Act x2 = paste(g2.at_time(j), f, A);
          if (distinct_values(x1.values()) > grid_.depth ||
              distinct_values(x2.values()) > grid_.depth) {
            continue;
          }
          ++combos;
          for (int dir = 0; dir < 2; ++dir) {
            const Act& base = dir == 0 ? x1 : x2;
            const Act& other = dir == 0 ? x2 : x1;
            const auto before = total_queries_;
            Act g3 = Act::from_atoms(space, i, bounds(i, base).mid());
            budget.used += total_queries_ - before;
            if (!ask(budget, i, g3, base, all).equiv()) continue;
            bool found = false;
            for (const auto& B : essential_now) {
              if (strictly(budget, i, g3, other, B, dir == 0)) {
                found = true;
                break;
              }
            }
            if (!found) {
              clause.pass = false;
              clause.counterexample =
                  std::string(dir == 0 ? "g3 ~ g1 1_A + f 1_A^c but not g3 <^B g2 1_A + f 1_A^c"
                                       : "g3 ~ g2 1_A + f 1_A^c but not g3 >^B g1 1_A + f 1_A^c") +
                  " for any essential B; A=" + space.describe(A) + " g1: " +
                  act_text(space, g1) + " | g2: " + act_text(space, g2) +
                  " | f: " + act_text(space, f) + " | g3: " + act_text(space, g3);
              break;
            }
          }
        }
      });
    }
  } catch (const BudgetExhausted&) {
    clause.truncated = true;
  }
  if (essential_next.empty()) clause.detail = "no essential event at t=" + std::to_string(j);
  if (clause.detail.empty()) clause.detail = std::to_string(combos) + " combinations";
  clause.queries = budget.used;
  report.clauses.push_back(clause);
  return report;
}

AxiomReport AxiomChecker::check_ST(std::size_t i) {
  const auto& space = oracle_.space();
  if (i >= space.last_time()) throw PreconditionError("level out of range");
  AxiomReport report;
  report.axiom = "ST";
  report.level = i;
  ClauseResult clause = make_clause(i == 0 ? "ST.0" : "ST.i", "sure-thing principle");
  Budget budget{0, cap_};
  const std::size_t j = i + 1;
  const std::size_t mi = space.num_atoms(i);
  const std::size_t mj = space.num_atoms(j);
  const auto& essential_next = essential_events(j);
  const Event all = Event::all(space.num_states()).with_time(i);
  bool omega_seen = false;
  std::size_t triples = 0;

  auto premise = [&](const Act& x1, const Act& x2) {
    auto before = total_queries_;
    const CceBounds& b1 = bounds(i, x1);
    const CceBounds& b2 = bounds(i, x2);
    budget.used += total_queries_ - before;
    std::vector<double> c(mi, 0.0);
    for (std::size_t k = 0; k < mi; ++k) {
      const double lo = b1.lower[k];
      const double up = b2.upper[k];
      if (std::isfinite(lo) && std::isfinite(up)) {
        if (lo > up + slack_at(up)) return false;
        c[k] = lo + 0.5 * (up - lo);
      } else if (std::isfinite(lo)) {
        c[k] = lo;
      } else if (std::isfinite(up)) {
        c[k] = up;
      }
    }
    Act g = Act::from_atoms(space, i, c);
    return ask(budget, i, g, x1, all).succeq && ask(budget, i, g, x2, all).preceq;
  };

  try {
    for (const auto& A : essential_next) {
      if (!clause.pass) break;
      std::vector<std::size_t> inside;
      std::vector<std::size_t> outside;
      for (std::size_t h = 0; h < mj; ++h) {
        (A.contains(space.atom_states(j, h).front()) ? inside : outside).push_back(h);
      }
      if (outside.empty()) {
        omega_seen = true;
        continue;
      }
      for_each_assignment(inside.size(), grid_.values, [&](const std::vector<double>& f1) {
        if (!clause.pass) return;
        for_each_assignment(inside.size(), grid_.values, [&](const std::vector<double>& f2) {
          if (!clause.pass) return;
          ++triples;
          std::optional<std::vector<double>> true_h;
          std::optional<std::vector<double>> false_h;
          for_each_assignment(outside.size(), grid_.values, [&](const std::vector<double>& h) {
            if (true_h && false_h) return;
            std::vector<double> v1(mj, 0.0);
            std::vector<double> v2(mj, 0.0);
            for (std::size_t q = 0; q < inside.size(); ++q) {
              v1[inside[q]] = f1[q];
              v2[inside[q]] = f2[q];
            }
            for (std::size_t q = 0; q < outside.size(); ++q) {
              v1[outside[q]] = h[q];
              v2[outside[q]] = h[q];
            }
            Act x1 = Act::from_atoms(space, j, v1);
            Act x2 = Act::from_atoms(space, j, v2);
            if (distinct_values(x1.values()) > grid_.depth ||
                distinct_values(x2.values()) > grid_.depth) {
              return;
            }
            bool p = premise(x1, x2);
            if (p && !true_h) true_h = h;
            if (!p && !false_h) false_h = h;
          });
          if (true_h && false_h) {
            clause.pass = false;
            auto show = [&](const std::vector<double>& inside_vals,
                            const std::vector<double>& rest) {
              std::vector<double> v(mj, 0.0);
              for (std::size_t q = 0; q < inside.size(); ++q) v[inside[q]] = inside_vals[q];
              for (std::size_t q = 0; q < outside.size(); ++q) v[outside[q]] = rest[q];
              return act_text(space, Act::from_atoms(space, j, v));
            };
            clause.counterexample =
                "A=" + space.describe(A) + "; some g1 brackets f1 1_A + h 1_A^c and f2 1_A + h 1_A^c" +
                " (x1: " + show(f1, *true_h) + " | x2: " + show(f2, *true_h) +
                ") but no g2 brackets the pair with k (x1: " + show(f1, *false_h) +
                " | x2: " + show(f2, *false_h) + ")";
          }
        });
      });
    }
  } catch (const BudgetExhausted&) {
    clause.truncated = true;
  }
  clause.detail = std::to_string(triples) + " (A, f1, f2) triples";
  if (omega_seen) clause.detail += "; A = Omega reduces to the premise";
  clause.queries = budget.used;
  report.clauses.push_back(clause);
  return report;
}

AxiomReport AxiomChecker::check_C(std::size_t i, const Act& f, const std::string& style) {
  const auto& space = oracle_.space();
  if (i >= space.last_time()) throw PreconditionError("level out of range");
  if (style != "shift" && style != "atomwise" && style != "random") {
    throw PreconditionError("unknown sequence style '" + style + "'");
  }
  AxiomReport report;
  report.axiom = "C";
  report.level = i;
  ClauseResult clause = make_clause(i == 0 ? "C.0" : "C.i", "pointwise continuity (" + style + ")");
  Budget budget{0, cap_};
  const std::size_t j = i + 1;
  const std::size_t mi = space.num_atoms(i);
  const std::size_t mj = space.num_atoms(j);
  const Event all = Event::all(space.num_states()).with_time(i);
  const auto essential_now = essential_events(i);

  // perturbation directions: f_n = f + dir / n
  std::vector<std::vector<double>> dirs;
  if (style == "shift") {
    dirs.push_back(std::vector<double>(mj, 1.0));
    dirs.push_back(std::vector<double>(mj, -1.0));
  } else if (style == "atomwise") {
    for (std::size_t h = 0; h < mj; ++h) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> d(mj, 0.0);
        d[h] = sgn;
        dirs.push_back(d);
      }
    }
  } else {
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
    for (double x : f.values()) seed = seed * 1099511628211ULL ^ std::hash<double>{}(x);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int r = 0; r < 2; ++r) {
      std::vector<double> d(mj);
      for (auto& x : d) x = unit(rng);
      dirs.push_back(d);
    }
  }

  try {
    auto before = total_queries_;
    auto c = bounds(i, f.at_time(j)).mid();
    budget.used += total_queries_ - before;
    for (double delta : {1e-2, 1e-4}) {
      for (int side = 0; side < 2 && clause.pass; ++side) {
        // side 0: g below f, needs g <= f_n eventually; side 1: g above f
        std::vector<double> gv(mi);
        for (std::size_t k = 0; k < mi; ++k) gv[k] = c[k] + (side == 0 ? -delta : delta);
        Act g = Act::from_atoms(space, i, gv);
        if (!strictly(budget, i, g, f.at_time(j), all, side == 0)) continue;
        for (const auto& d : dirs) {
          if (!clause.pass) break;
          for (std::size_t k = 0; k < mi && clause.pass; ++k) {
            const Event ev = space.atom_event(i, k);
            for (int e = 20; e <= 26; ++e) {
              const double n = std::ldexp(1.0, e);
              std::vector<double> fv = f.at_time(j).atom_values(space);
              for (std::size_t h = 0; h < mj; ++h) fv[h] += d[h] / n;
              Act fn = Act::from_atoms(space, j, fv);
              auto ans = ask(budget, i, g, fn, ev);
              const bool ok = side == 0 ? ans.preceq : ans.succeq;
              if (!ok) {
                clause.pass = false;
                clause.counterexample =
                    std::string(side == 0 ? "g < f but g <= f_n fails" : "g > f but g >= f_n fails") +
                    " on " + space.describe_atom(i, k) + " at n=2^" + std::to_string(e) +
                    "; f: " + act_text(space, f) + " | g: " + act_text(space, g) +
                    " | delta=" + format_number(delta);
                break;
              }
            }
          }
        }
      }
    }
  } catch (const BudgetExhausted&) {
    clause.truncated = true;
  }
  clause.detail = "partition = atoms at t=" + std::to_string(i) +
                  "; eventually = every n=2^k, 20<=k<=26";
  clause.queries = budget.used;
  report.clauses.push_back(clause);
  return report;
}

AxiomReport AxiomChecker::check_C_grid(std::size_t i, const std::string& style) {
  const auto& space = oracle_.space();
  AxiomReport report;
  report.axiom = "C";
  report.level = i;
  ClauseResult clause = make_clause(i == 0 ? "C.0" : "C.i", "pointwise continuity (" + style + ", grid)");
  std::size_t acts = 0;
  for (const auto& f : grid_acts(space, i + 1, grid_)) {
    ++acts;
    auto one = check_C(i, f, style);
    const auto& c = one.clauses.front();
    clause.queries += c.queries;
    clause.truncated = clause.truncated || c.truncated;
    if (!c.pass) {
      clause.pass = false;
      clause.counterexample = c.counterexample;
      break;
    }
    if (clause.queries >= cap_) {
      clause.truncated = true;
      break;
    }
  }
  clause.detail = std::to_string(acts) + " grid acts; partition = atoms at t=" +
                  std::to_string(i) + "; eventually = every n=2^k, 20<=k<=26";
  report.clauses.push_back(clause);
  return report;
}

AxiomChecker::Classification AxiomChecker::tri_partition(std::size_t i, const Act& g,
                                                         const Act& f) {
  const auto& space = oracle_.space();
  const auto& nulls = null_family(i);
  Budget budget{0, std::numeric_limits<std::size_t>::max()};
  std::vector<std::size_t> a, b, c;
  Classification out;
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    if (nulls.is_null_atom(k)) continue;
    auto ans = ask(budget, i, g, f, space.atom_event(i, k));
    if (ans.succeq && ans.preceq) {
      a.push_back(k);
    } else if (ans.succeq) {
      b.push_back(k);
    } else if (ans.preceq) {
      c.push_back(k);
    } else {
      out.unclassified.push_back(k);
    }
  }
  out.parts = {space.union_of(i, a), space.union_of(i, b), space.union_of(i, c)};
  return out;
}

}  // namespace itp
