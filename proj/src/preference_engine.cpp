#include "itp/preference_engine.hpp"

#include <algorithm>
#include <cmath>

#include "itp/errors.hpp"

namespace itp {

Representation::Representation(SpacePtr space, ProbabilityMeasure p, UtilityField field)
    : space_(std::move(space)), p_(std::move(p)), field_(std::move(field)) {
  if (!space_) throw PreconditionError("representation needs a space");
  if (p_.size() != space_->num_states()) {
    throw InvariantError("measure has " + std::to_string(p_.size()) + " weights for " +
                         std::to_string(space_->num_states()) + " states");
  }
  if (field_.space_ptr() != space_ && field_.space().state_ids() != space_->state_ids()) {
    throw InvariantError("utility field lives on a different space");
  }
  if (field_.num_times() != space_->num_times()) {
    throw InvariantError("utility field has the wrong number of times");
  }
  if (!field_.is_measurable()) {
    throw InvariantError("utility field is not measurable");
  }
  if (!u0().continuous()) {
    throw InvariantError("initial utility u0 must be continuous");
  }
  auto star = is_star_continuous(field_, p_);
  if (!star.star_continuous) {
    throw InvariantError("utility field is not star-continuous at t=" +
                         std::to_string(*star.witness_time));
  }
}

Representation Representation::unchecked(SpacePtr space, ProbabilityMeasure p,
                                         UtilityField field) {
  Representation r;
  r.space_ = std::move(space);
  r.p_ = std::move(p);
  r.field_ = std::move(field);
  return r;
}

std::string to_string(VerdictTag tag) {
  switch (tag) {
    case VerdictTag::Succeq:
      return "SUCCEQ";
    case VerdictTag::Preceq:
      return "PRECEQ";
    case VerdictTag::Equiv:
      return "EQUIV";
    case VerdictTag::Mixed:
      return "MIXED";
  }
  return "?";
}

namespace {

void check_times(const Representation& rep, std::size_t s, std::size_t t) {
  rep.space().check_time(s);
  rep.space().check_time(t);
  if (s >= t) {
    throw PreconditionError("need s < t (got s=" + std::to_string(s) +
                            ", t=" + std::to_string(t) + ")");
  }
}

void check_act(const Representation& rep, const Act& f, std::size_t t, const char* what) {
  if (f.size() != rep.space().num_states()) {
    throw PreconditionError(std::string(what) + " has the wrong number of states");
  }
  if (f.time_index() > t) {
    throw PreconditionError(std::string(what) + " is tagged t=" +
                            std::to_string(f.time_index()) + ", after t=" +
                            std::to_string(t));
  }
  require_measurable(rep.space(), f.at_time(t));
}

std::vector<double> utility_atom_expectation(const Representation& rep, std::size_t s,
                                             std::size_t t, const Act& f) {
  auto u = rep.field().evaluate(t, f.values());
  return conditional_atom_values(rep.space(), rep.measure(), u, s);
}

}  // namespace

Act conditional_utility(const Representation& rep, std::size_t s, std::size_t t,
                        const Act& f) {
  rep.space().check_time(s);
  rep.space().check_time(t);
  if (s > t) throw PreconditionError("conditioning time exceeds the act's time");
  check_act(rep, f, t, "f");
  return Act::from_atoms(rep.space(), s, utility_atom_expectation(rep, s, t, f));
}

Act v_functional(const Representation& rep, std::size_t i, const Act& f) {
  return conditional_utility(rep, i, i + 1, f);
}

Act cce(const Representation& rep, std::size_t s, std::size_t t, const Act& f,
        double tol) {
  check_times(rep, s, t);
  check_act(rep, f, t, "f");
  const auto& space = rep.space();
  auto target = utility_atom_expectation(rep, s, t, f);
  auto mass = rep.measure().atom_probabilities(space, s);
  std::vector<double> out(target.size(), 0.0);
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (mass[k] == 0.0) continue;
    out[k] = invert(rep.field().curve(s, k), target[k], std::min(tol, kInvertTol)).x;
  }
  return Act::from_atoms(space, s, out);
}

Verdict compare(const Representation& rep, std::size_t s, std::size_t t, const Act& g,
                const Act& f, double tol) {
  check_times(rep, s, t);
  check_act(rep, g, s, "g");
  check_act(rep, f, t, "f");
  const auto& space = rep.space();
  auto target = utility_atom_expectation(rep, s, t, f);
  auto mass = rep.measure().atom_probabilities(space, s);
  const std::size_t m = space.num_atoms(s);
  std::vector<std::size_t> a, b, c;
  Verdict v;
  v.atom_margin.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    if (mass[k] == 0.0) continue;
    const double d = rep.field().curve(s, k)(g.at_time(s).on_atom(space, k)) - target[k];
    v.atom_margin[k] = d;
    if (d > tol) {
      b.push_back(k);
    } else if (d < -tol) {
      c.push_back(k);
    } else {
      a.push_back(k);
    }
  }
  v.parts = {space.union_of(s, a), space.union_of(s, b), space.union_of(s, c)};
  if (b.empty() && c.empty()) {
    v.tag = VerdictTag::Equiv;
  } else if (c.empty()) {
    v.tag = VerdictTag::Succeq;
  } else if (b.empty()) {
    v.tag = VerdictTag::Preceq;
  } else {
    v.tag = VerdictTag::Mixed;
  }
  return v;
}

double semigroup_residual(const Representation& rep, std::size_t s, std::size_t t,
                          std::size_t v, const Act& f, double tol) {
  if (!(s < t && t < v)) throw PreconditionError("need s < t < v");
  Act direct = cce(rep, s, v, f, tol);
  Act nested = cce(rep, s, t, cce(rep, t, v, f, tol), tol);
  double worst = 0.0;
  for (std::size_t w = 0; w < direct.size(); ++w) {
    if (rep.measure().weight(w) == 0.0) continue;
    worst = std::max(worst, std::fabs(direct[w] - nested[w]));
  }
  return worst;
}

bool time_consistency_check(const Representation& rep, std::size_t s, std::size_t t,
                            std::size_t v, const Act& g, const Act& f, double tol) {
  if (!(s < t && t < v)) throw PreconditionError("need s < t < v");
  Verdict outer = compare(rep, s, v, g, f, tol);
  if (outer.tag == VerdictTag::Mixed) {
    throw PreconditionError("time consistency needs g and f to be comparable (got MIXED)");
  }
  Act h = cce(rep, t, v, f, tol);
  Verdict inner = compare(rep, s, t, g, h, tol);
  const bool need_c_empty = outer.tag != VerdictTag::Preceq;
  const bool need_b_empty = outer.tag != VerdictTag::Succeq;
  if (need_c_empty && !inner.parts.c.empty()) return false;
  if (need_b_empty && !inner.parts.b.empty()) return false;
  return true;
}

ComparisonPair random_pair(const Representation& rep, std::mt19937_64& rng,
                           double value_scale, double margin) {
  const auto& space = rep.space();
  const std::size_t last = space.last_time();
  if (last == 0) throw PreconditionError("random pairs need at least two times");
  std::uniform_real_distribution<double> value(-value_scale, value_scale);
  std::uniform_real_distribution<double> offset(margin, 1.0);
  std::uniform_int_distribution<int> choice(0, 2);
  for (int attempt = 0; attempt < 100; ++attempt) {
    ComparisonPair p;
    p.s = std::uniform_int_distribution<std::size_t>(0, last - 1)(rng);
    p.t = std::uniform_int_distribution<std::size_t>(p.s + 1, last)(rng);
    std::vector<double> fv(space.num_atoms(p.t));
    for (auto& x : fv) x = value(rng);
    p.f = Act::from_atoms(space, p.t, fv);
    Act c;
    try {
      c = cce(rep, p.s, p.t, p.f);
    } catch (const RangeError&) {
      continue;
    }
    std::vector<double> gv(space.num_atoms(p.s));
    for (std::size_t k = 0; k < gv.size(); ++k) {
      const double base = c.on_atom(space, k);
      switch (choice(rng)) {
        case 0:
          gv[k] = base;
          break;
        case 1:
          gv[k] = base + offset(rng);
          break;
        default:
          gv[k] = base - offset(rng);
          break;
      }
    }
    p.g = Act::from_atoms(space, p.s, gv);
    return p;
  }
  throw RangeError("could not draw a comparison pair inside the utility ranges");
}

bool same_partition(const Verdict& a, const Verdict& b) {
  return a.tag == b.tag && a.parts.a.same_states(b.parts.a) &&
         a.parts.b.same_states(b.parts.b) && a.parts.c.same_states(b.parts.c);
}

DiscountResult discount_transform(const Representation& rep,
                                  const ProbabilityMeasure& p_star, std::uint64_t seed,
                                  std::size_t pairs, double tol) {
  const auto& space = rep.space();
  const auto& p = rep.measure();
  if (p_star.size() != p.size() || !p.equivalent_to(p_star)) {
    throw PreconditionError("P* is not equivalent to P");
  }
  DiscountResult out;
  for (std::size_t t = 0; t < space.num_times(); ++t) {
    auto pa = p.atom_probabilities(space, t);
    auto pb = p_star.atom_probabilities(space, t);
    std::vector<double> b(pa.size(), 1.0);
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (pb[k] > 0.0) b[k] = pa[k] / pb[k];
    }
    out.beta.push_back(Act::from_atoms(space, t, b));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < pairs; ++n) {
    auto pr = random_pair(rep, rng);
    Verdict base = compare(rep, pr.s, pr.t, pr.g, pr.f, tol);
    auto ut = rep.field().evaluate(pr.t, pr.f.values());
    for (std::size_t w = 0; w < ut.size(); ++w) ut[w] *= out.beta[pr.t][w];
    auto rhs = conditional_atom_values(space, p_star, ut, pr.s);
    auto mass = p_star.atom_probabilities(space, pr.s);
    std::vector<std::size_t> a, b, c;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      if (mass[k] == 0.0) continue;
      const double lhs = out.beta[pr.s].on_atom(space, k) *
                         rep.field().curve(pr.s, k)(pr.g.on_atom(space, k));
      const double d = lhs - rhs[k];
      (d > tol ? b : d < -tol ? c : a).push_back(k);
    }
    bool same = space.union_of(pr.s, a).same_states(base.parts.a) &&
                space.union_of(pr.s, b).same_states(base.parts.b) &&
                space.union_of(pr.s, c).same_states(base.parts.c);
    if (!same) ++out.flips;
    ++out.pairs;
  }
  out.check = out.flips == 0;
  return out;
}

NumeraireResult numeraire_transform(const Representation& rep,
                                    const std::vector<Act>& numeraire, std::uint64_t seed,
                                    std::size_t pairs, double tol) {
  const auto& space = rep.space();
  if (numeraire.size() != space.num_times()) {
    throw PreconditionError("numeraire needs one act per time");
  }
  std::vector<std::vector<MonotoneCurve>> curves(space.num_times());
  for (std::size_t t = 0; t < space.num_times(); ++t) {
    const Act& b = numeraire[t];
    if (b.size() != space.num_states() || b.time_index() > t) {
      throw PreconditionError("numeraire at t=" + std::to_string(t) + " is malformed");
    }
    require_measurable(space, b.at_time(t));
    for (std::size_t k = 0; k < space.num_atoms(t); ++k) {
      const double scale = b.at_time(t).on_atom(space, k);
      if (!(scale > 0.0)) {
        throw PreconditionError("numeraire must be strictly positive (t=" +
                                std::to_string(t) + ", atom " +
                                space.describe_atom(t, k) + ")");
      }
      curves[t].push_back(rep.field().curve(t, k).scaled_input(scale));
    }
  }
  NumeraireResult out{Representation(rep.space_ptr(), rep.measure(),
                                     UtilityField(rep.space_ptr(), std::move(curves))),
                      false, 0, 0};
  std::mt19937_64 rng(seed);
  for (std::size_t n = 0; n < pairs; ++n) {
    auto pr = random_pair(rep, rng);
    std::vector<double> gs(space.num_states());
    std::vector<double> fs(space.num_states());
    for (std::size_t w = 0; w < gs.size(); ++w) {
      gs[w] = pr.g[w] / numeraire[pr.s][w];
      fs[w] = pr.f[w] / numeraire[pr.t][w];
    }
    Verdict a = compare(rep, pr.s, pr.t, pr.g, pr.f, tol);
    Verdict b = compare(out.rep, pr.s, pr.t, Act(pr.s, gs), Act(pr.t, fs), tol);
    if (!same_partition(a, b)) ++out.flips;
    ++out.pairs;
  }
  out.check = out.flips == 0;
  return out;
}

}  // namespace itp
