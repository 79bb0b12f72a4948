#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "itp/filtered_space.hpp"
#include "itp/utility_field.hpp"

namespace itp {

/// A probability on the final states together with a stochastic dynamic
/// utility. The curve at time 0 is the initial utility u0.
class Representation {
 public:
  Representation() = default;
  /// Throws InvariantError unless the field is measurable, star-continuous
  /// under `p` at every time, u0 is continuous, and the sizes agree.
  Representation(SpacePtr space, ProbabilityMeasure p, UtilityField field);

  /// Skips the validity checks (fault injection only).
  static Representation unchecked(SpacePtr space, ProbabilityMeasure p, UtilityField field);

  const FilteredSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const ProbabilityMeasure& measure() const noexcept { return p_; }
  const UtilityField& field() const noexcept { return field_; }
  const MonotoneCurve& u0() const { return field_.curve(0, 0); }

 private:
  SpacePtr space_;
  ProbabilityMeasure p_;
  UtilityField field_;
};

struct TriPartition {
  Event a;  ///< equivalence
  Event b;  ///< strict preference for g
  Event c;  ///< strict preference for f
};

enum class VerdictTag { Succeq, Preceq, Equiv, Mixed };

std::string to_string(VerdictTag tag);

struct Verdict {
  VerdictTag tag = VerdictTag::Equiv;
  TriPartition parts;
  /// d = u(s, g) - E[u(t, f) | F_s] per atom at s (0 on null atoms).
  std::vector<double> atom_margin;
};

/// E_P[u(t, f) | F_s] as an act at s.
Act conditional_utility(const Representation& rep, std::size_t s, std::size_t t,
                        const Act& f);

/// V_{i+1}(f) = E_P[u(i+1, f) | F_i].
Act v_functional(const Representation& rep, std::size_t i, const Act& f);

/// Conditional certainty equivalent of f (at t) seen from time s < t.
/// Throws RangeError when E[u(t, f) | F_s] leaves the range of u(s, .).
Act cce(const Representation& rep, std::size_t s, std::size_t t, const Act& f,
        double tol = kDefaultTol);

/// Tri-partition of the positive-probability atoms at s by the sign of
/// u(s, g) - E[u(t, f) | F_s] with tie band `tol`.
Verdict compare(const Representation& rep, std::size_t s, std::size_t t, const Act& g,
                const Act& f, double tol = kDefaultTol);

/// Sup over positive-probability states of |cce(s,v,f) - cce(s,t,cce(t,v,f))|.
double semigroup_residual(const Representation& rep, std::size_t s, std::size_t t,
                          std::size_t v, const Act& f, double tol = kDefaultTol);

/// With h = cce(t, v, f): whether compare(s, t, g, h) keeps the relation of
/// compare(s, v, g, f). Throws PreconditionError when the latter is Mixed.
bool time_consistency_check(const Representation& rep, std::size_t s, std::size_t t,
                            std::size_t v, const Act& g, const Act& f,
                            double tol = kDefaultTol);

/// A random comparison pair (s < t, g at s, f at t) whose g sits at the CCE
/// of f or at least `margin` away from it on every atom.
struct ComparisonPair {
  std::size_t s = 0;
  std::size_t t = 1;
  Act g;
  Act f;
};

ComparisonPair random_pair(const Representation& rep, std::mt19937_64& rng,
                           double value_scale = 2.0, double margin = 0.05);

struct DiscountResult {
  /// beta[t] = E_{P*}[dP/dP* | F_t].
  std::vector<Act> beta;
  bool check = false;
  std::size_t pairs = 0;
  std::size_t flips = 0;
};

/// Stochastic discount factor for an equivalent measure P*, verified on
/// `pairs` seeded random comparisons: the verdict of beta_s u(s, g) against
/// E_{P*}[beta_t u(t, f) | F_s] must match compare under (P, u).
DiscountResult discount_transform(const Representation& rep,
                                  const ProbabilityMeasure& p_star,
                                  std::uint64_t seed = 1, std::size_t pairs = 100,
                                  double tol = kDefaultTol);

struct NumeraireResult {
  Representation rep;
  bool check = false;
  std::size_t pairs = 0;
  std::size_t flips = 0;
};

/// u*(t, x) = u(t, x B_t); verdicts of (g / B_s, f / B_t) under the new
/// representation must match those of (g, f) under the old one.
NumeraireResult numeraire_transform(const Representation& rep,
                                    const std::vector<Act>& numeraire,
                                    std::uint64_t seed = 1, std::size_t pairs = 100,
                                    double tol = kDefaultTol);

bool same_partition(const Verdict& a, const Verdict& b);

}  // namespace itp
