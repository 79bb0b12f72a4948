#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "itp/filtered_space.hpp"
#include "itp/preference_engine.hpp"

namespace itp {

struct OracleAnswer {
  bool succeq = false;
  bool preceq = false;

  bool equiv() const noexcept { return succeq && preceq; }
};

/// Conditional intertemporal preference queried one comparison at a time.
class PreferenceOracle {
 public:
  virtual ~PreferenceOracle() = default;

  virtual const FilteredSpace& space() const = 0;
  /// g 1_A against f 1_A under the relation between times i and i+1;
  /// g measurable at i, f at i+1, A a union of atoms at i.
  virtual OracleAnswer query(std::size_t i, const Act& g, const Act& f,
                             const Event& a) const = 0;
};

/// Utility tie band of induced oracles, relative to max(1, |E[u(f)]|).
inline constexpr double kOracleTol = 1e-12;

/// Answers through compare on a representation, restricted to A.
class InducedOracle : public PreferenceOracle {
 public:
  explicit InducedOracle(Representation rep, double tol = kOracleTol);

  const FilteredSpace& space() const override { return rep_.space(); }
  OracleAnswer query(std::size_t i, const Act& g, const Act& f,
                     const Event& a) const override;
  const Representation& representation() const noexcept { return rep_; }

 private:
  Representation rep_;
  double tol_;
};

/// Value of f 1_A on atom k at time i.
using LevelFunctional = std::function<double(std::size_t atom, const Act& f)>;

/// Induced answers everywhere except at one level, where u_i(g) is compared
/// against a supplied functional with a tie band.
class FunctionalOracle : public PreferenceOracle {
 public:
  FunctionalOracle(Representation base, std::size_t level, LevelFunctional value,
                   double band = kOracleTol);

  const FilteredSpace& space() const override { return base_.space(); }
  OracleAnswer query(std::size_t i, const Act& g, const Act& f,
                     const Event& a) const override;

 private:
  InducedOracle induced_;
  Representation base_;
  std::size_t level_;
  LevelFunctional value_;
  double band_;
};

/// Answers "g 1_A >= f 1_A" always and "<=" never at one level.
class DegenerateOracle : public PreferenceOracle {
 public:
  DegenerateOracle(Representation base, std::size_t level);

  const FilteredSpace& space() const override { return induced_.space(); }
  OracleAnswer query(std::size_t i, const Act& g, const Act& f,
                     const Event& a) const override;

 private:
  InducedOracle induced_;
  std::size_t level_;
};

enum class FaultKind { Intransitive, Degenerate, FlatSegment, NonAdditive, Jump };

std::string to_string(FaultKind kind);
/// Axiom family the fault is built to break: "T", "M", "ST" or "C".
std::string fault_target(FaultKind kind);

/// Fault-injected oracle at `level`; other levels answer as `base`.
/// Intransitive: tie band 1e-3. Degenerate: always >=, never <=.
/// FlatSegment: utility flat on [0.5, 1]. NonAdditive: E[u(f)] + 0.5 max f
/// over the atom. Jump: u_{i+1} jumps at 1 on the first atom at i+1.
std::unique_ptr<PreferenceOracle> make_fault_oracle(FaultKind kind,
                                                    const Representation& base,
                                                    std::size_t level);

/// Finite outcome grid and the maximal number of distinct values per act.
struct ActGrid {
  std::vector<double> values{-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  std::size_t depth = 3;

  /// Throws InvariantError unless sorted strictly and containing 0.
  void validate() const;
  double max_abs() const;
};

/// Every act at time i whose atom values come from the grid with at most
/// `depth` distinct values, in lexicographic order of atom values.
std::vector<Act> grid_acts(const FilteredSpace& space, std::size_t i, const ActGrid& grid);

struct ClauseResult {
  std::string id;
  std::string name;
  bool pass = true;
  std::string detail;
  std::string counterexample;
  std::size_t queries = 0;
  bool truncated = false;
};

struct AxiomReport {
  std::string axiom;  ///< "T", "M", "ST" or "C"
  std::size_t level = 0;
  std::vector<ClauseResult> clauses;

  bool pass() const;
  std::string to_text() const;
};

/// Lower = inf{a : a >= f} and upper = sup{a : a <= f} per atom at i.
struct CceBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  /// Midpoint per atom; 0 where either bound is infinite.
  std::vector<double> mid() const;
};

inline constexpr std::size_t kQueryCap = 10000000;

/// Exhaustive axiom checks against one oracle. Caches oracle-derived
/// bounds and null families; each check counts its own queries and stops
/// (marking the clause as truncated) at `query_cap`.
class AxiomChecker {
 public:
  AxiomChecker(const PreferenceOracle& oracle, ActGrid grid = {},
               std::size_t query_cap = kQueryCap);

  const PreferenceOracle& oracle() const noexcept { return oracle_; }
  const ActGrid& grid() const noexcept { return grid_; }

  /// Null atoms at time j (0 < j <= N) derived from the relation between
  /// j-1 and j; for j = 0 only the empty event is null.
  const NullFamily& null_family(std::size_t j);

  /// Bisection on constants per atom (bracket doubling from [-1, 1]).
  const CceBounds& bounds(std::size_t i, const Act& f);

  AxiomReport check_T(std::size_t i);
  AxiomReport check_M(std::size_t i);
  AxiomReport check_ST(std::size_t i);
  /// style: "shift" (f +- 1/n), "atomwise" (one atom at a time) or
  /// "random" (seeded perturbations inside a 1/n envelope).
  AxiomReport check_C(std::size_t i, const Act& f, const std::string& style);
  /// check_C over every grid act at i+1.
  AxiomReport check_C_grid(std::size_t i, const std::string& style);

  struct Classification {
    TriPartition parts;
    std::vector<std::size_t> unclassified;
  };
  Classification tri_partition(std::size_t i, const Act& g, const Act& f);

  std::size_t total_queries() const noexcept { return total_queries_; }

 private:
  struct Budget;
  OracleAnswer ask(Budget& budget, std::size_t i, const Act& g, const Act& f,
                   const Event& a);
  std::vector<Event> essential_events(std::size_t j);
  bool strictly(Budget& budget, std::size_t i, const Act& g, const Act& f,
                const Event& b, bool below);

  const PreferenceOracle& oracle_;
  ActGrid grid_;
  std::size_t cap_;
  std::size_t total_queries_ = 0;
  std::map<std::size_t, NullFamily> nulls_;
  std::map<std::pair<std::size_t, std::vector<double>>, CceBounds> bounds_;
  /// Per-atom bounds keyed by the values of f on the atom.
  struct AtomKey {
    std::size_t level;
    std::size_t atom;
    std::vector<double> values;
    auto operator<=>(const AtomKey&) const = default;
  };
  std::map<AtomKey, std::pair<double, double>> atom_bounds_;
  std::unordered_map<std::string, std::uint8_t> answers_;
};

/// derive_null_events as a free function.
NullFamily derive_null_events(const PreferenceOracle& oracle, std::size_t j,
                              const ActGrid& grid = {});

}  // namespace itp
