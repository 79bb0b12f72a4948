#include "itp/utility_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "itp/errors.hpp"

namespace itp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvariantError(std::string(what) + " must be finite and > 0");
  }
}

double jump_raw(const Jump& j, double x, int side) {
  // side: -1 left limit, 0 value, +1 right limit
  if (side == 0) {
    if (x < j.at) return 0.0;
    if (x == j.at) return j.left_gap;
    return j.left_gap + j.right_gap;
  }
  if (side < 0) return x <= j.at ? 0.0 : j.left_gap + j.right_gap;
  return x >= j.at ? j.left_gap + j.right_gap : 0.0;
}

}  // namespace

MonotoneCurve MonotoneCurve::identity() { return MonotoneCurve{}; }

MonotoneCurve MonotoneCurve::linear(double slope) {
  require_positive(slope, "linear slope");
  MonotoneCurve c;
  c.kind_ = CurveKind::Linear;
  c.param_ = slope;
  return c;
}

MonotoneCurve MonotoneCurve::piecewise_linear(
    std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw InvariantError("piecewise-linear curve needs >= 2 points");
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw InvariantError("piecewise-linear points must be finite");
    }
  }
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (!(points[k - 1].first < points[k].first)) {
      throw InvariantError("piecewise-linear breakpoints must be strictly sorted");
    }
    if (!(points[k - 1].second < points[k].second)) {
      throw InvariantError("piecewise-linear values must be strictly increasing");
    }
  }
  MonotoneCurve c;
  c.kind_ = CurveKind::PiecewiseLinear;
  c.param_ = 0.0;
  c.points_ = std::move(points);
  if (std::fabs(c.base(0.0)) > kMeasureTol) {
    throw InvariantError("piecewise-linear curve must vanish at 0 (value " +
                         format_number(c.base(0.0)) + ")");
  }
  return c;
}

MonotoneCurve MonotoneCurve::exponential(double a) {
  if (!std::isfinite(a) || a == 0.0) {
    throw InvariantError("exponential risk parameter must be finite and nonzero");
  }
  MonotoneCurve c;
  c.kind_ = CurveKind::Exponential;
  c.param_ = a;
  return c;
}

MonotoneCurve MonotoneCurve::power(double gamma) {
  require_positive(gamma, "power exponent");
  MonotoneCurve c;
  c.kind_ = CurveKind::Power;
  c.param_ = gamma;
  return c;
}

MonotoneCurve MonotoneCurve::with_jump(Jump jump) const {
  if (!std::isfinite(jump.at) || !std::isfinite(jump.left_gap) ||
      !std::isfinite(jump.right_gap) || jump.left_gap < 0.0 || jump.right_gap < 0.0 ||
      jump.left_gap + jump.right_gap <= 0.0) {
    throw InvariantError("jump gaps must be nonnegative with a positive total");
  }
  for (const auto& j : jumps_) {
    if (j.at == jump.at) throw InvariantError("duplicate jump abscissa");
  }
  MonotoneCurve c = *this;
  c.jumps_.push_back(jump);
  std::sort(c.jumps_.begin(), c.jumps_.end(),
            [](const Jump& a, const Jump& b) { return a.at < b.at; });
  return c;
}

MonotoneCurve MonotoneCurve::scaled_input(double b) const {
  require_positive(b, "input scale");
  MonotoneCurve c = *this;
  c.in_scale_ *= b;
  for (auto& j : c.jumps_) j.at /= b;
  return c;
}

MonotoneCurve MonotoneCurve::scaled_output(double s) const {
  require_positive(s, "output scale");
  MonotoneCurve c = *this;
  c.out_scale_ *= s;
  for (auto& j : c.jumps_) {
    j.left_gap *= s;
    j.right_gap *= s;
  }
  return c;
}

double MonotoneCurve::base(double z) const {
  switch (kind_) {
    case CurveKind::Identity:
      return z;
    case CurveKind::Linear:
      return param_ * z;
    case CurveKind::Exponential:
      return -std::expm1(-param_ * z) / param_;
    case CurveKind::Power:
      return std::copysign(std::pow(std::fabs(z), param_), z);
    case CurveKind::PiecewiseLinear: {
      const auto& p = points_;
      std::size_t k;
      if (z <= p.front().first) {
        k = 0;
      } else if (z >= p.back().first) {
        k = p.size() - 2;
      } else {
        auto it = std::upper_bound(p.begin(), p.end(), z,
                                   [](double v, const auto& pt) { return v < pt.first; });
        k = static_cast<std::size_t>(it - p.begin()) - 1;
      }
      const auto& [x0, y0] = p[k];
      const auto& [x1, y1] = p[k + 1];
      if (z == x0) return y0;
      if (z == x1) return y1;
      return y0 + (y1 - y0) / (x1 - x0) * (z - x0);
    }
  }
  return z;
}

double MonotoneCurve::base_inverse(double v) const {
  switch (kind_) {
    case CurveKind::Identity:
      return v;
    case CurveKind::Linear:
      return v / param_;
    case CurveKind::Exponential:
      return -std::log1p(-param_ * v) / param_;
    case CurveKind::Power:
      return std::copysign(std::pow(std::fabs(v), 1.0 / param_), v);
    case CurveKind::PiecewiseLinear: {
      const auto& p = points_;
      std::size_t k;
      if (v <= p.front().second) {
        k = 0;
      } else if (v >= p.back().second) {
        k = p.size() - 2;
      } else {
        auto it = std::upper_bound(p.begin(), p.end(), v,
                                   [](double y, const auto& pt) { return y < pt.second; });
        k = static_cast<std::size_t>(it - p.begin()) - 1;
      }
      const auto& [x0, y0] = p[k];
      const auto& [x1, y1] = p[k + 1];
      if (v == y0) return x0;
      if (v == y1) return x1;
      return x0 + (x1 - x0) / (y1 - y0) * (v - y0);
    }
  }
  return v;
}

double MonotoneCurve::jump_offset(double x, int side) const {
  double total = 0.0;
  for (const auto& j : jumps_) total += jump_raw(j, x, side) - jump_raw(j, 0.0, 0);
  return total;
}

double MonotoneCurve::operator()(double x) const {
  double v = out_scale_ * base(in_scale_ * x);
  return jumps_.empty() ? v : v + jump_offset(x, 0);
}

double MonotoneCurve::left_limit(double x) const {
  double v = out_scale_ * base(in_scale_ * x);
  return jumps_.empty() ? v : v + jump_offset(x, -1);
}

double MonotoneCurve::right_limit(double x) const {
  double v = out_scale_ * base(in_scale_ * x);
  return jumps_.empty() ? v : v + jump_offset(x, +1);
}

bool MonotoneCurve::closed_form_inverse() const noexcept {
  return jumps_.empty() && kind_ != CurveKind::Power;
}

double MonotoneCurve::range_inf() const {
  double base_inf = -kInf;
  if (kind_ == CurveKind::Exponential && param_ < 0.0) base_inf = 1.0 / param_;
  if (!std::isfinite(base_inf)) return -kInf;
  return out_scale_ * base_inf + jump_offset(-kInf, 0);
}

double MonotoneCurve::range_sup() const {
  double base_sup = kInf;
  if (kind_ == CurveKind::Exponential && param_ > 0.0) base_sup = 1.0 / param_;
  if (!std::isfinite(base_sup)) return kInf;
  return out_scale_ * base_sup + jump_offset(kInf, 0);
}

std::string MonotoneCurve::to_string() const {
  std::string out;
  switch (kind_) {
    case CurveKind::Identity:
      out = "identity";
      break;
    case CurveKind::Linear:
      out = "linear(" + format_number(param_) + ")";
      break;
    case CurveKind::Exponential:
      out = "exp(" + format_number(param_) + ")";
      break;
    case CurveKind::Power:
      out = "power(" + format_number(param_) + ")";
      break;
    case CurveKind::PiecewiseLinear: {
      out = "pl(";
      for (std::size_t k = 0; k < points_.size(); ++k) {
        if (k) out += ",";
        out += "(" + format_number(points_[k].first) + "," +
               format_number(points_[k].second) + ")";
      }
      out += ")";
      break;
    }
  }
  if (in_scale_ != 1.0) out += " in(" + format_number(in_scale_) + ")";
  if (out_scale_ != 1.0) out += " out(" + format_number(out_scale_) + ")";
  for (const auto& j : jumps_) {
    out += " jump(" + format_number(j.at) + "," + format_number(j.left_gap) + "," +
           format_number(j.right_gap) + ")";
  }
  return out;
}

InverseResult invert(const MonotoneCurve& curve, double y, double tol) {
  if (!std::isfinite(y)) throw RangeError("cannot invert a non-finite value");
  const double lo_bound = curve.range_inf();
  const double hi_bound = curve.range_sup();
  if (y >= hi_bound) {
    throw RangeError("value " + format_number(y) + " is outside the range of " +
                     curve.to_string() + " (bounded above by " + format_number(hi_bound) +
                     ")");
  }
  if (y <= lo_bound) {
    throw RangeError("value " + format_number(y) + " is outside the range of " +
                     curve.to_string() + " (bounded below by " + format_number(lo_bound) +
                     ")");
  }

  for (const auto& j : curve.jumps()) {
    const double left = curve.left_limit(j.at);
    const double right = curve.right_limit(j.at);
    if (left <= y && y <= right) {
      return {j.at, std::fabs(curve(j.at) - y) > tol};
    }
  }

  if (curve.closed_form_inverse()) {
    return {curve.base_inverse(y / curve.out_scale()) / curve.in_scale(), false};
  }

  double lo = -1.0;
  double hi = 1.0;
  int expansions = 0;
  while (curve(lo) > y) {
    lo *= 2.0;
    if (++expansions > 1100 || !std::isfinite(lo)) {
      throw RangeError("no bracket found below " + format_number(y) + " for " +
                       curve.to_string());
    }
  }
  while (curve(hi) < y) {
    hi *= 2.0;
    if (++expansions > 1100 || !std::isfinite(hi)) {
      throw RangeError("no bracket found above " + format_number(y) + " for " +
                       curve.to_string());
    }
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double v = curve(mid);
    if (v == y) return {mid, false};
    if (v < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = std::fabs(curve(lo) - y) <= std::fabs(curve(hi) - y) ? lo : hi;
  return {x, false};
}

// ----------------------------------------------------------- UtilityField

UtilityField::UtilityField(SpacePtr space, std::vector<std::vector<MonotoneCurve>> curves)
    : space_(std::move(space)), curves_(std::move(curves)) {
  if (!space_) throw PreconditionError("utility field needs a space");
  if (curves_.size() != space_->num_times()) {
    throw InvariantError("utility field needs one curve list per time");
  }
  state_curve_.resize(curves_.size());
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    if (curves_[i].size() != space_->num_atoms(i)) {
      throw InvariantError("utility field at t=" + std::to_string(i) +
                           " needs one curve per atom");
    }
    state_curve_[i].resize(space_->num_states());
    for (std::size_t s = 0; s < space_->num_states(); ++s) {
      state_curve_[i][s] = space_->atom_of(i, s);
    }
  }
}

UtilityField UtilityField::uniform(SpacePtr space, const MonotoneCurve& curve) {
  std::vector<std::vector<MonotoneCurve>> curves;
  for (std::size_t i = 0; i < space->num_times(); ++i) {
    curves.emplace_back(space->num_atoms(i), curve);
  }
  return UtilityField(std::move(space), std::move(curves));
}

UtilityField UtilityField::unchecked_per_state(
    SpacePtr space, std::vector<std::vector<MonotoneCurve>> per_state) {
  UtilityField f;
  f.space_ = std::move(space);
  if (per_state.size() != f.space_->num_times()) {
    throw InvariantError("utility field needs one curve list per time");
  }
  f.state_curve_.resize(per_state.size());
  for (std::size_t i = 0; i < per_state.size(); ++i) {
    if (per_state[i].size() != f.space_->num_states()) {
      throw InvariantError("per-state field needs one curve per state");
    }
    f.state_curve_[i].resize(f.space_->num_states());
    for (std::size_t s = 0; s < f.space_->num_states(); ++s) f.state_curve_[i][s] = s;
  }
  f.curves_ = std::move(per_state);
  return f;
}

const MonotoneCurve& UtilityField::curve(std::size_t i, std::size_t atom) const {
  return state_curve(i, space_->atom_states(i, atom).front());
}

const MonotoneCurve& UtilityField::state_curve(std::size_t i, std::size_t state) const {
  return curves_.at(i)[state_curve_.at(i).at(state)];
}

bool UtilityField::is_measurable() const {
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    for (std::size_t k = 0; k < space_->num_atoms(i); ++k) {
      const auto& first = curve(i, k);
      for (auto s : space_->atom_states(i, k)) {
        if (!(state_curve(i, s) == first)) return false;
      }
    }
  }
  return true;
}

UtilityField UtilityField::with_curve(std::size_t i, std::size_t atom,
                                      MonotoneCurve curve) const {
  UtilityField out = *this;
  const auto& states = space_->atom_states(i, atom);
  // keep one entry per atom when the field is atom-structured
  const std::size_t slot = state_curve_.at(i).at(states.front());
  bool shared = false;
  for (std::size_t s = 0; s < space_->num_states(); ++s) {
    bool in_atom = std::find(states.begin(), states.end(), s) != states.end();
    if (!in_atom && state_curve_[i][s] == slot) shared = true;
  }
  if (!shared) {
    out.curves_[i][slot] = std::move(curve);
    for (auto s : states) out.state_curve_[i][s] = slot;
  } else {
    out.curves_[i].push_back(std::move(curve));
    for (auto s : states) out.state_curve_[i][s] = out.curves_[i].size() - 1;
  }
  return out;
}

std::vector<double> UtilityField::evaluate(std::size_t i,
                                           std::span<const double> values) const {
  std::vector<double> out(values.size());
  const auto& idx = state_curve_.at(i);
  const auto& curves = curves_[i];
  for (std::size_t s = 0; s < values.size(); ++s) out[s] = curves[idx[s]](values[s]);
  return out;
}

Act eval(const UtilityField& field, std::size_t j, const Act& f) {
  if (f.time_index() > j) {
    throw PreconditionError("act at t=" + std::to_string(f.time_index()) +
                            " is not measurable at t=" + std::to_string(j));
  }
  return Act(j, field.evaluate(j, f.values()));
}

DiscontinuitySets discontinuity_sets(const UtilityField& field, std::size_t j,
                                     const Act& f) {
  const std::size_t n = field.space().num_states();
  std::vector<bool> right(n, false);
  std::vector<bool> left(n, false);
  std::vector<bool> any(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& c = field.state_curve(j, s);
    for (const auto& jump : c.jumps()) {
      if (jump.at != f[s]) continue;
      if (jump.right_gap > 0.0) right[s] = true;
      if (jump.left_gap > 0.0) left[s] = true;
    }
    any[s] = right[s] || left[s];
  }
  return {Event(std::move(right), j), Event(std::move(left), j), Event(std::move(any), j)};
}

StarContinuity is_star_continuous(const UtilityField& field, const ProbabilityMeasure& p,
                                  std::size_t j) {
  const auto& space = field.space();
  space.check_time(j);
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    if (p.weight(s) == 0.0) continue;
    const auto& c = field.state_curve(j, s);
    if (c.jumps().empty()) continue;
    // f sits on the first jump of every state sharing this curve's atom
    std::vector<double> values(space.num_states(), 0.0);
    const std::size_t atom = space.atom_of(j, s);
    for (auto t : space.atom_states(j, atom)) values[t] = c.jumps().front().at;
    StarContinuity out;
    out.star_continuous = false;
    out.witness = Act(j, std::move(values));
    out.witness_time = j;
    return out;
  }
  return {};
}

StarContinuity is_star_continuous(const UtilityField& field, const ProbabilityMeasure& p) {
  for (std::size_t j = 0; j < field.num_times(); ++j) {
    auto r = is_star_continuous(field, p, j);
    if (!r.star_continuous) return r;
  }
  return {};
}

}  // namespace itp
