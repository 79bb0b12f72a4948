#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itp/scenario.hpp"

namespace itp {

/// The inheritance example: states A, AcD, AcDc; variants paper-arithmetic
/// (P(A) = 11/101) and paper-stated (P(A) = 0.01), P(D | A^c) = 1e-6.
ScenarioSpec villa_scenario();

struct VillaReport {
  std::string variant;
  /// 1.11e6 * 0.9 + 0.5 * 2e5 * 0.01, exactly.
  Rational displayed_t1;
  /// 1.8e6 (1 - 1e-2 - 1e-6) + 0.5 * 2e5 (1e-2 + 1e-6), exactly.
  Rational displayed_t2;
  /// u0^{-1} E[u(t1, villa_t1)] in exact arithmetic.
  Rational t1_cce_exact;
  double t1_cce = 0.0;
  /// E[u(t2, villa_t2)] under paper-stated.
  double t2_model = 0.0;
  double t2_relative_gap = 0.0;
  Verdict t0_vs_t2;
  Verdict t1_vs_t2;
  std::string text;
};

/// Needs u0 = identity for the exact path.
VillaReport run_villa(const ScenarioSpec& spec, std::string_view variant = {});

/// Adapted fraction strategies of a scenario's [strategies] section: one
/// decision per (t < N, atom at t).
class StrategySet {
 public:
  /// Throws PreconditionError without a strategy section, with an empty
  /// fraction list or with more than 1e5 strategies.
  explicit StrategySet(const ScenarioSpec& spec);

  std::size_t size() const noexcept { return count_; }
  std::size_t decisions() const noexcept { return slots_.size(); }
  /// Fraction index per decision.
  std::vector<std::size_t> choice(std::size_t strategy) const;
  /// Wealth X_t for t = 0..N.
  std::vector<Act> wealth(std::size_t strategy) const;
  /// "t0{a,b}=0.5 t1{a}=1 ..."
  std::string label(std::size_t strategy) const;
  /// Decisions taken strictly before time t.
  std::size_t decisions_before(std::size_t t) const;

 private:
  const ScenarioSpec& spec_;
  std::vector<std::pair<std::size_t, std::size_t>> slots_;
  std::size_t count_ = 0;
};

struct DppReport {
  std::size_t strategies = 0;
  std::size_t optimal = 0;
  std::string optimal_label;
  /// v[t] atom-wise along the optimal prefix.
  std::vector<Act> v;
  /// min over strategies, times and positive atoms of v - E[u(V_T) | F_t],
  /// among strategies sharing the prefix with the reference.
  double dominance_margin = 0.0;
  /// max |v - E[u(V_T^opt) | F_t]|.
  double equality_gap = 0.0;
  bool dominance = false;
  bool equality = false;
  std::string text;
};

/// Exhaustive value function: v(t, X_t^a) on each atom is the max over
/// strategies that agree with a before t of E[u(N, V_N) | F_t].
DppReport run_dpp(const ScenarioSpec& spec, std::string_view variant = {},
                  double tol = 1e-9);

struct ForwardReport {
  bool monotone_concave = false;
  bool initial = false;
  bool supermartingale = false;
  bool martingale = false;
  bool equivalence = false;
  std::optional<std::size_t> optimal;
  std::string optimal_label;
  std::size_t optimal_count = 0;
  std::string text;

  bool pass() const {
    return monotone_concave && initial && supermartingale && martingale && equivalence;
  }
};

/// Forward-performance conditions for the scenario's field as U(x, t).
/// `deflate` scales U at the final time (1 keeps it).
ForwardReport run_forward_check(const ScenarioSpec& spec, std::string_view variant = {},
                                double tol = 1e-9, double deflate = 1.0);

}  // namespace itp
