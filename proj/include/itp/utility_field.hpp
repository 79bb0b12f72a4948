#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itp/filtered_space.hpp"

namespace itp {

enum class CurveKind { Identity, Linear, PiecewiseLinear, Exponential, Power };

/// Explicit discontinuity of a curve at abscissa `at`:
/// u(at) - u(at-) = left_gap and u(at+) - u(at) = right_gap.
struct Jump {
  double at = 0.0;
  double left_gap = 0.0;
  double right_gap = 0.0;

  bool operator==(const Jump&) const = default;
};

struct InverseResult {
  double x = 0.0;
  /// y fell inside a jump gap; x is the jump abscissa.
  bool gap = false;
};

inline constexpr double kInvertTol = 1e-12;

class MonotoneCurve;
InverseResult invert(const MonotoneCurve& curve, double y, double tol);

/// Strictly increasing map R -> R with u(0) = 0.
///
/// The base kinds are identity, linear(slope), piecewise_linear(points),
/// exponential(a): (1 - e^{-a x}) / a and power(gamma): sign(x) |x|^gamma.
/// A curve value is out_scale * base(in_scale * x) plus the contribution of
/// its jumps, shifted so that the jumps do not move u(0).
/// Piecewise-linear curves extend their first and last segments to +-inf.
class MonotoneCurve {
 public:
  MonotoneCurve() = default;

  static MonotoneCurve identity();
  static MonotoneCurve linear(double slope);
  /// Points sorted strictly in x and y; the interpolant must vanish at 0.
  static MonotoneCurve piecewise_linear(std::vector<std::pair<double, double>> points);
  static MonotoneCurve exponential(double a);
  static MonotoneCurve power(double gamma);

  MonotoneCurve with_jump(Jump jump) const;
  /// x -> u(b x), b > 0.
  MonotoneCurve scaled_input(double b) const;
  /// x -> c u(x), c > 0.
  MonotoneCurve scaled_output(double c) const;

  double operator()(double x) const;
  double left_limit(double x) const;
  double right_limit(double x) const;

  CurveKind kind() const noexcept { return kind_; }
  double parameter() const noexcept { return param_; }
  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }
  double in_scale() const noexcept { return in_scale_; }
  double out_scale() const noexcept { return out_scale_; }
  bool continuous() const noexcept { return jumps_.empty(); }
  /// True when the kind has a closed-form inverse and no jumps.
  bool closed_form_inverse() const noexcept;

  /// Infimum / supremum of the curve over R (possibly infinite, not attained
  /// when finite).
  double range_inf() const;
  double range_sup() const;

  /// Scenario-file syntax, e.g. "exp(1)", "pl((-1,-2),(0,0),(1,0.5))".
  std::string to_string() const;

  bool operator==(const MonotoneCurve&) const = default;

 private:
  friend InverseResult invert(const MonotoneCurve& curve, double y, double tol);

  double base(double z) const;
  double base_inverse(double v) const;
  double jump_offset(double x, int side) const;

  CurveKind kind_ = CurveKind::Identity;
  double param_ = 1.0;
  std::vector<std::pair<double, double>> points_;
  std::vector<Jump> jumps_;
  double in_scale_ = 1.0;
  double out_scale_ = 1.0;
};

/// Solves curve(x) = y. Closed form for identity, linear, exponential and
/// piecewise-linear curves without jumps; bracketed bisection (initial
/// bracket [-1, 1], doubled until it straddles y, at most 200 halvings)
/// otherwise. Throws RangeError when y is outside the attained range.
InverseResult invert(const MonotoneCurve& curve, double y, double tol = kInvertTol);

/// Stochastic dynamic utility: one curve per (time, atom).
class UtilityField {
 public:
  UtilityField() = default;
  /// `curves[i][k]` is the curve on atom k of partitions[i].
  UtilityField(SpacePtr space, std::vector<std::vector<MonotoneCurve>> curves);

  static UtilityField uniform(SpacePtr space, const MonotoneCurve& curve);
  /// One curve per (time, state) without the measurability requirement.
  /// Only for fault-injection experiments.
  static UtilityField unchecked_per_state(
      SpacePtr space, std::vector<std::vector<MonotoneCurve>> per_state);

  const FilteredSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  std::size_t num_times() const noexcept { return curves_.size(); }

  /// Curve attached to atom k at time i (the curve of its first state).
  const MonotoneCurve& curve(std::size_t i, std::size_t atom) const;
  const MonotoneCurve& state_curve(std::size_t i, std::size_t state) const;
  /// Every atom carries a single curve.
  bool is_measurable() const;

  UtilityField with_curve(std::size_t i, std::size_t atom, MonotoneCurve curve) const;

  /// u(i, values[s], s) for every state.
  std::vector<double> evaluate(std::size_t i, std::span<const double> values) const;

 private:
  SpacePtr space_;
  std::vector<std::vector<MonotoneCurve>> curves_;
  std::vector<std::vector<std::size_t>> state_curve_;
};

/// result(w) = u(j, f(w), w). `f` may be measurable at any time <= j.
Act eval(const UtilityField& field, std::size_t j, const Act& f);

struct DiscontinuitySets {
  Event right;  ///< RD_f: right limit above the value
  Event left;   ///< LD_f: value above the left limit
  Event any;    ///< D_f = RD_f u LD_f
};

DiscontinuitySets discontinuity_sets(const UtilityField& field, std::size_t j,
                                     const Act& f);

struct StarContinuity {
  bool star_continuous = true;
  /// When not star-continuous: an act f with P(D_f) > 0.
  std::optional<Act> witness;
  std::optional<std::size_t> witness_time;
};

/// On a finite space an act can sit on any jump of any atom's curve, so the
/// field is star-continuous at j iff no positive-probability atom carries a
/// curve with a jump.
StarContinuity is_star_continuous(const UtilityField& field,
                                  const ProbabilityMeasure& p, std::size_t j);
/// All times.
StarContinuity is_star_continuous(const UtilityField& field,
                                  const ProbabilityMeasure& p);

}  // namespace itp
