#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "itp/axioms.hpp"
#include "itp/errors.hpp"
#include "itp/preference_engine.hpp"

namespace itp {

/// -4, -3.5, ..., 4.
std::vector<double> default_recovery_grid();

struct RecoveryOptions {
  /// Outcomes at which recovered curves are tabulated; must contain 0.
  std::vector<double> grid = default_recovery_grid();
  /// Calibration outcome for the canonical measure split.
  double calibration = 1.0;
  /// Largest accepted additivity residual.
  double debreu_tol = 1e-6;
  /// Number of simple acts in the additivity audit (seeded sample when the
  /// grid product is larger).
  std::size_t audit_acts = 64;
  std::uint64_t audit_seed = 7;
};

/// Output of one step: the measure and curves on the atoms at `level`.
struct RecoveredStep {
  std::size_t level = 1;
  std::vector<double> atom_probability;
  std::vector<MonotoneCurve> curves;
  std::vector<std::size_t> null_atoms;
  double debreu_residual = 0.0;
  /// max |P_level(G) - P_{level-1}(G)| over atoms G at level-1.
  double parent_mismatch = 0.0;
  std::string normalization;
};

/// Recovery refused: not enough essential atoms, an additivity residual
/// above tolerance, or a calibration failure. Carries the partial step.
class RecoveryError : public Error {
 public:
  RecoveryError(const std::string& what, RecoveredStep step)
      : Error(what), step_(std::move(step)) {}
  const RecoveredStep& step() const noexcept { return step_; }

 private:
  RecoveredStep step_;
};

/// Per atom at i, the indifference constant a with a 1_atom ~ f 1_atom,
/// located by bisection to adjacent doubles. Atoms where f vanishes get 0,
/// as do atoms on which every constant is indifferent (null atoms).
/// Throws PreconditionError when only one side of the bracket can be found.
Act cce_from_oracle(const PreferenceOracle& oracle, std::size_t i, const Act& f);

/// Step 0: V(f) = u0(cce(f)), per-atom components V_j(x) = V(x 1_{A_j}),
/// canonical split at the calibration outcome.
RecoveredStep recover_step0(const PreferenceOracle& oracle, const MonotoneCurve& u0,
                            const RecoveryOptions& options = {});

/// Step i -> i+1 through the composite functional f -> E_{P_i}[u_i(cce(f))],
/// reweighted by Z = dP_i / dP~ on the atoms at i.
RecoveredStep recover_step_i(const PreferenceOracle& oracle, std::size_t i,
                             const std::vector<double>& atom_probability_i,
                             const std::vector<MonotoneCurve>& curves_i,
                             const RecoveryOptions& options = {});

/// Atom-by-atom conditional recovery at level i (no composite functional):
/// p(H | G) proportional to u0-free components at G. Used to compare routes.
RecoveredStep recover_step_direct(const PreferenceOracle& oracle, std::size_t i,
                                  const std::vector<double>& atom_probability_i,
                                  const std::vector<MonotoneCurve>& curves_i,
                                  const RecoveryOptions& options = {});

struct Recovered {
  Representation rep;
  std::vector<RecoveredStep> steps;
};

/// All steps; states inside a final atom share its mass uniformly.
Recovered recover(const PreferenceOracle& oracle, const MonotoneCurve& u0,
                  const RecoveryOptions& options = {});

struct UniquenessResult {
  bool ok = false;
  double deviation = 0.0;
  /// State null under exactly one of the measures.
  std::optional<std::size_t> witness_state;
  /// delta[i] = dP_A|F_i / dP_B|F_i (0 on null atoms).
  std::vector<Act> delta;
  std::string detail;
};

/// Relative uniqueness of B against A on `grid`: equivalent measures and
/// |u_B(i, x) - delta_i u_A(i, x)| <= tol at every time and positive atom.
UniquenessResult check_relative_uniqueness(const Representation& a, const Representation& b,
                                           const std::vector<double>& grid =
                                               default_recovery_grid(),
                                           double tol = 1e-6);

}  // namespace itp
