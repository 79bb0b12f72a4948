#include "itp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace itp {

namespace {

constexpr double kNullLevel = 1e-12;

/// Smallest constant c on the atom with (c >= f) or largest with (c <= f);
/// nullopt when the answer never changes within 2^64.
std::optional<double> bisect_side(const PreferenceOracle& oracle, std::size_t i,
                                  std::size_t atom, const Act& f, double start, bool upper) {
  const auto& space = oracle.space();
  const Event ev = space.atom_event(i, atom);
  auto holds = [&](double a) {
    std::vector<double> v(space.num_states(), 0.0);
    for (auto s : space.atom_states(i, atom)) v[s] = a;
    auto ans = oracle.query(i, Act(i, std::move(v)), f, ev);
    return upper ? ans.preceq : ans.succeq;
  };
  const double away = upper ? 1.0 : -1.0;  // direction in which "yes" fails
  double yes;
  double no;
  if (holds(start)) {
    yes = start;
    double step = 1.0;
    for (int e = 0;; ++e) {
      if (e == 64) return std::nullopt;
      const double cand = yes + away * step;
      if (!holds(cand)) {
        no = cand;
        break;
      }
      yes = cand;
      step *= 2.0;
    }
  } else {
    no = start;
    double step = 1.0;
    for (int e = 0;; ++e) {
      if (e == 64) return std::nullopt;
      const double cand = no - away * step;
      if (holds(cand)) {
        yes = cand;
        break;
      }
      no = cand;
      step *= 2.0;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = no + 0.5 * (yes - no);
    if (mid == no || mid == yes) break;
    (holds(mid) ? yes : no) = mid;
  }
  return yes;
}

struct Components {
  std::vector<std::vector<double>> table;  // [atom at i+1][grid point]
  std::vector<double> calibration;         // component at the calibration outcome
  std::vector<std::size_t> parent;
};

/// weight(G) * u_i(G, cce(x 1_H)) for every atom H at i+1 and grid point x.
Components tabulate(const PreferenceOracle& oracle, std::size_t i,
                    const std::vector<double>& weight, const std::vector<MonotoneCurve>& curves,
                    const RecoveryOptions& options) {
  const auto& space = oracle.space();
  const std::size_t j = i + 1;
  Components c;
  const std::size_t m = space.num_atoms(j);
  c.table.assign(m, {});
  c.calibration.assign(m, 0.0);
  for (std::size_t h = 0; h < m; ++h) {
    const std::size_t g = space.ancestor(j, h, i);
    c.parent.push_back(g);
    auto component = [&](double x) {
      if (weight[g] == 0.0 || x == 0.0) return 0.0;
      std::vector<double> v(space.num_atoms(j), 0.0);
      v[h] = x;
      Act ce = cce_from_oracle(oracle, i, Act::from_atoms(space, j, v));
      return weight[g] * curves[g](ce.on_atom(space, g));
    };
    for (double x : options.grid) c.table[h].push_back(component(x));
    c.calibration[h] = component(options.calibration);
  }
  return c;
}

std::size_t grid_index(const std::vector<double>& grid, double x) {
  return static_cast<std::size_t>(std::find(grid.begin(), grid.end(), x) - grid.begin());
}

double audit(const PreferenceOracle& oracle, std::size_t i, const std::vector<double>& weight,
             const std::vector<MonotoneCurve>& curves, const Components& c,
             const RecoveryOptions& options) {
  const auto& space = oracle.space();
  const std::size_t j = i + 1;
  const std::size_t m = space.num_atoms(j);
  std::vector<double> pool;
  for (double x : options.grid) {
    if (std::fabs(x) <= 2.0) pool.push_back(x);
  }
  if (pool.empty()) pool = options.grid;
  std::mt19937_64 rng(options.audit_seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  double residual = 0.0;
  for (std::size_t n = 0; n < options.audit_acts; ++n) {
    std::vector<double> v(m);
    for (auto& x : v) x = pool[pick(rng)];
    Act ce = cce_from_oracle(oracle, i, Act::from_atoms(space, j, v));
    double whole = 0.0;
    for (std::size_t g = 0; g < space.num_atoms(i); ++g) {
      if (weight[g] != 0.0) whole += weight[g] * curves[g](ce.on_atom(space, g));
    }
    double parts = 0.0;
    for (std::size_t h = 0; h < m; ++h) parts += c.table[h][grid_index(options.grid, v[h])];
    residual = std::max(residual, std::fabs(whole - parts));
  }
  return residual;
}

void validate_options(const RecoveryOptions& options) {
  if (std::find(options.grid.begin(), options.grid.end(), 0.0) == options.grid.end()) {
    throw PreconditionError("recovery grid must contain 0");
  }
  for (std::size_t k = 1; k < options.grid.size(); ++k) {
    if (!(options.grid[k - 1] < options.grid[k])) {
      throw PreconditionError("recovery grid must be strictly sorted");
    }
  }
  if (!(options.calibration != 0.0)) throw PreconditionError("calibration outcome must be nonzero");
}

MonotoneCurve tabulated(const std::vector<double>& grid, const std::vector<double>& values,
                        double scale, std::size_t level, std::size_t atom) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    pts.emplace_back(grid[k], grid[k] == 0.0 ? 0.0 : values[k] / scale);
  }
  for (std::size_t k = 1; k < pts.size(); ++k) {
    if (!(pts[k - 1].second < pts[k].second)) {
      throw InvariantError("recovered curve on atom " + std::to_string(atom) + " at t=" +
                           std::to_string(level) + " is not strictly increasing at x=" +
                           format_number(pts[k].first));
    }
  }
  return MonotoneCurve::piecewise_linear(std::move(pts));
}

RecoveredStep split(const PreferenceOracle& oracle, std::size_t i,
                    const std::vector<double>& atom_probability_i, const Components& c,
                    const std::vector<double>& grid, double calibration) {
  const auto& space = oracle.space();
  const std::size_t j = i + 1;
  const std::size_t m = space.num_atoms(j);
  RecoveredStep step;
  step.level = j;
  step.atom_probability.assign(m, 0.0);
  step.curves.assign(m, MonotoneCurve::identity());
  std::vector<bool> null(m, false);
  for (std::size_t h = 0; h < m; ++h) {
    null[h] = std::all_of(c.table[h].begin(), c.table[h].end(),
                          [](double v) { return std::fabs(v) <= kNullLevel; });
    if (null[h]) step.null_atoms.push_back(h);
  }
  double total = 0.0;
  for (std::size_t h = 0; h < m; ++h) {
    if (null[h]) continue;
    if (!(c.calibration[h] > 0.0)) {
      throw RecoveryError("component on atom " + space.describe_atom(j, h) +
                              " is not positive at the calibration outcome " +
                              format_number(calibration),
                          step);
    }
    total += c.calibration[h];
  }
  std::vector<double> tilde(m, 0.0);
  std::vector<double> tilde_parent(space.num_atoms(i), 0.0);
  for (std::size_t h = 0; h < m; ++h) {
    if (null[h]) continue;
    tilde[h] = c.calibration[h] / total;
    tilde_parent[c.parent[h]] += tilde[h];
  }
  for (std::size_t g = 0; g < space.num_atoms(i); ++g) {
    if ((atom_probability_i[g] > 0.0) != (tilde_parent[g] > 0.0)) {
      throw RecoveryError("P~ is not equivalent to P_" + std::to_string(i) + " on atom " +
                              space.describe_atom(i, g),
                          step);
    }
  }
  std::vector<double> mass(space.num_atoms(i), 0.0);
  for (std::size_t h = 0; h < m; ++h) {
    if (null[h]) continue;
    const std::size_t g = c.parent[h];
    const double z = atom_probability_i[g] / tilde_parent[g];
    step.atom_probability[h] = z * tilde[h];
    mass[g] += step.atom_probability[h];
    step.curves[h] = tabulated(grid, c.table[h], step.atom_probability[h], j, h);
  }
  for (std::size_t g = 0; g < space.num_atoms(i); ++g) {
    step.parent_mismatch =
        std::max(step.parent_mismatch, std::fabs(mass[g] - atom_probability_i[g]));
  }
  step.normalization = "p~ at x=" + format_number(calibration) + ", Z = dP_" +
                       std::to_string(i) + "/dP~ on atoms at t=" + std::to_string(i);
  return step;
}

}  // namespace

std::vector<double> default_recovery_grid() {
  std::vector<double> g;
  for (int k = -8; k <= 8; ++k) g.push_back(0.5 * k);
  return g;
}

Act cce_from_oracle(const PreferenceOracle& oracle, std::size_t i, const Act& f) {
  const auto& space = oracle.space();
  if (i >= space.last_time()) throw PreconditionError("cce level out of range");
  std::vector<double> out(space.num_atoms(i), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto& states = space.atom_states(i, k);
    double mean = 0.0;
    bool zero = true;
    for (auto s : states) {
      mean += f[s];
      zero = zero && f[s] == 0.0;
    }
    if (zero) continue;
    mean /= static_cast<double>(states.size());
    auto lo = bisect_side(oracle, i, k, f, mean, false);
    auto hi = bisect_side(oracle, i, k, f, mean, true);
    if (!lo && !hi) continue;
    if (!lo || !hi) {
      throw PreconditionError("no bracket for the certainty equivalent on atom " +
                              space.describe_atom(i, k) +
                              " (oracle violates non-degeneracy locally)");
    }
    out[k] = *lo + 0.5 * (*hi - *lo);
  }
  return Act::from_atoms(space, i, out);
}

RecoveredStep recover_step_i(const PreferenceOracle& oracle, std::size_t i,
                             const std::vector<double>& atom_probability_i,
                             const std::vector<MonotoneCurve>& curves_i,
                             const RecoveryOptions& options) {
  validate_options(options);
  const auto& space = oracle.space();
  if (i >= space.last_time()) throw PreconditionError("recovery level out of range");
  if (atom_probability_i.size() != space.num_atoms(i) || curves_i.size() != space.num_atoms(i)) {
    throw PreconditionError("step inputs do not match the atoms at t=" + std::to_string(i));
  }
  Components c = tabulate(oracle, i, atom_probability_i, curves_i, options);
  std::size_t essential = 0;
  for (const auto& row : c.table) {
    if (std::any_of(row.begin(), row.end(), [](double v) { return std::fabs(v) > kNullLevel; })) {
      ++essential;
    }
  }
  RecoveredStep partial;
  partial.level = i + 1;
  if (essential < 3) {
    throw RecoveryError("only " + std::to_string(essential) + " essential atoms at t=" +
                            std::to_string(i + 1) + "; at least three are required",
                        partial);
  }
  partial.debreu_residual = audit(oracle, i, atom_probability_i, curves_i, c, options);
  if (partial.debreu_residual > options.debreu_tol) {
    throw RecoveryError("additivity residual " + format_number(partial.debreu_residual) +
                            " at t=" + std::to_string(i + 1) + " exceeds " +
                            format_number(options.debreu_tol),
                        partial);
  }
  RecoveredStep step = split(oracle, i, atom_probability_i, c, options.grid, options.calibration);
  step.debreu_residual = partial.debreu_residual;
  return step;
}

RecoveredStep recover_step0(const PreferenceOracle& oracle, const MonotoneCurve& u0,
                            const RecoveryOptions& options) {
  return recover_step_i(oracle, 0, {1.0}, {u0}, options);
}

RecoveredStep recover_step_direct(const PreferenceOracle& oracle, std::size_t i,
                                  const std::vector<double>& atom_probability_i,
                                  const std::vector<MonotoneCurve>& curves_i,
                                  const RecoveryOptions& options) {
  validate_options(options);
  const auto& space = oracle.space();
  const std::size_t j = i + 1;
  std::vector<double> ones(space.num_atoms(i), 1.0);
  Components c = tabulate(oracle, i, ones, curves_i, options);
  RecoveredStep step;
  step.level = j;
  step.atom_probability.assign(space.num_atoms(j), 0.0);
  step.curves.assign(space.num_atoms(j), MonotoneCurve::identity());
  for (std::size_t g = 0; g < space.num_atoms(i); ++g) {
    auto kids = space.children(i, g);
    double total = 0.0;
    for (auto h : kids) {
      if (atom_probability_i[g] > 0.0 && c.calibration[h] > 0.0) total += c.calibration[h];
    }
    for (auto h : kids) {
      if (atom_probability_i[g] == 0.0 || !(c.calibration[h] > 0.0)) {
        step.null_atoms.push_back(h);
        continue;
      }
      const double conditional = c.calibration[h] / total;
      step.atom_probability[h] = atom_probability_i[g] * conditional;
      step.curves[h] = tabulated(options.grid, c.table[h], conditional, j, h);
    }
  }
  std::sort(step.null_atoms.begin(), step.null_atoms.end());
  step.normalization = "conditional split at x=" + format_number(options.calibration);
  return step;
}

Recovered recover(const PreferenceOracle& oracle, const MonotoneCurve& u0,
                  const RecoveryOptions& options) {
  const auto& space = oracle.space();
  Recovered out;
  std::vector<double> prob{1.0};
  std::vector<MonotoneCurve> curves{u0};
  std::vector<std::vector<MonotoneCurve>> field{curves};
  for (std::size_t i = 0; i < space.last_time(); ++i) {
    RecoveredStep step = recover_step_i(oracle, i, prob, curves, options);
    prob = step.atom_probability;
    curves = step.curves;
    field.push_back(curves);
    out.steps.push_back(std::move(step));
  }
  const std::size_t last = space.last_time();
  std::vector<double> w(space.num_states(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < space.num_atoms(last); ++k) {
    const auto& states = space.atom_states(last, k);
    for (auto s : states) w[s] = prob[k] / static_cast<double>(states.size());
    total += prob[k];
  }
  for (auto& x : w) x /= total;
  auto ptr = std::make_shared<const FilteredSpace>(space);
  out.rep = Representation(ptr, ProbabilityMeasure(std::move(w)),
                           UtilityField(ptr, std::move(field)));
  return out;
}

UniquenessResult check_relative_uniqueness(const Representation& a, const Representation& b,
                                           const std::vector<double>& grid, double tol) {
  const auto& space = a.space();
  if (space.state_ids() != b.space().state_ids() ||
      space.num_times() != b.space().num_times()) {
    throw PreconditionError("representations live on different spaces");
  }
  UniquenessResult out;
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    if ((a.measure().weight(s) > 0.0) != (b.measure().weight(s) > 0.0)) {
      out.witness_state = s;
      out.detail = "measures are not equivalent: state " + space.state_id(s) +
                   " is null under exactly one of them";
      return out;
    }
  }
  for (std::size_t i = 0; i < space.num_times(); ++i) {
    auto pa = a.measure().atom_probabilities(space, i);
    auto pb = b.measure().atom_probabilities(space, i);
    std::vector<double> delta(pa.size(), 0.0);
    for (std::size_t k = 0; k < pa.size(); ++k) {
      if (pa[k] == 0.0) continue;
      delta[k] = pa[k] / pb[k];
      for (double x : grid) {
        const double d =
            std::fabs(b.field().curve(i, k)(x) - delta[k] * a.field().curve(i, k)(x));
        if (d > out.deviation) {
          out.deviation = d;
          out.detail = "largest deviation at t=" + std::to_string(i) + ", atom " +
                       space.describe_atom(i, k) + ", x=" + format_number(x);
        }
      }
    }
    out.delta.push_back(Act::from_atoms(space, i, delta));
  }
  out.ok = out.deviation <= tol;
  return out;
}

}  // namespace itp
