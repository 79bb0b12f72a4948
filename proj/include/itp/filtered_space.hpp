#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "itp/numeric.hpp"

namespace itp {

/// Absolute tolerance for measure normalization and measurability checks.
inline constexpr double kMeasureTol = 1e-12;
/// Default tolerance for sup-norm equality of acts and verdict bands.
inline constexpr double kDefaultTol = 1e-9;

/// A set of states, optionally tagged with the time index at which it is
/// required to be measurable.
class Event {
 public:
  Event() = default;
  explicit Event(std::vector<bool> members,
                 std::optional<std::size_t> time_index = std::nullopt);

  static Event none(std::size_t num_states);
  static Event all(std::size_t num_states);
  static Event of(std::size_t num_states, std::span<const std::size_t> states,
                  std::optional<std::size_t> time_index = std::nullopt);
  static Event of(std::size_t num_states,
                  std::initializer_list<std::size_t> states,
                  std::optional<std::size_t> time_index = std::nullopt);

  std::size_t num_states() const noexcept { return members_.size(); }
  bool contains(std::size_t state) const { return members_.at(state); }
  bool empty() const noexcept;
  std::size_t count() const noexcept;
  std::vector<std::size_t> states() const;
  std::optional<std::size_t> time_index() const noexcept { return time_index_; }
  Event with_time(std::optional<std::size_t> time_index) const;

  Event complement() const;
  Event operator|(const Event& other) const;
  Event operator&(const Event& other) const;
  Event operator-(const Event& other) const;
  bool subset_of(const Event& other) const;
  /// Member-set equality; time tags are ignored.
  bool same_states(const Event& other) const { return members_ == other.members_; }

 private:
  std::vector<bool> members_;
  std::optional<std::size_t> time_index_;
};

/// Finite state set with a refining chain of partitions, one per updating
/// time t_0 < ... < t_N. Atom order at each time is the order of first state
/// occurrence.
class FilteredSpace {
 public:
  /// `partitions[i]` lists the atoms at time index i as state indices.
  /// Throws InvariantError when partitions[0] is not trivial, a partition
  /// does not cover the states exactly once, or the chain does not refine.
  FilteredSpace(std::vector<std::string> state_ids, std::vector<double> times,
                std::vector<std::vector<std::vector<std::size_t>>> partitions);

  /// Convenience: partitions given by state identifiers.
  static FilteredSpace from_ids(
      std::vector<std::string> state_ids, std::vector<double> times,
      const std::vector<std::vector<std::vector<std::string>>>& partitions);

  std::size_t num_states() const noexcept { return state_ids_.size(); }
  std::size_t num_times() const noexcept { return times_.size(); }
  /// Index N of the final time.
  std::size_t last_time() const noexcept { return times_.size() - 1; }

  const std::string& state_id(std::size_t state) const { return state_ids_.at(state); }
  const std::vector<std::string>& state_ids() const noexcept { return state_ids_; }
  std::optional<std::size_t> find_state(std::string_view id) const;
  double time_label(std::size_t i) const { return times_.at(i); }
  const std::vector<double>& time_labels() const noexcept { return times_; }

  std::size_t num_atoms(std::size_t i) const { return atoms_.at(i).size(); }
  const std::vector<std::size_t>& atom_states(std::size_t i, std::size_t atom) const;
  std::size_t atom_of(std::size_t i, std::size_t state) const;
  Event atom_event(std::size_t i, std::size_t atom) const;
  /// Atom at time i containing atom `atom` of time j >= i.
  std::size_t ancestor(std::size_t j, std::size_t atom, std::size_t i) const;
  /// Atoms at time i+1 contained in atom `atom` of time i.
  std::vector<std::size_t> children(std::size_t i, std::size_t atom) const;

  /// Atom indices at time i whose union is `e`; throws InvariantError when
  /// `e` is not a union of atoms at i.
  std::vector<std::size_t> atoms_in(std::size_t i, const Event& e) const;
  /// Union of the listed atoms at time i.
  Event union_of(std::size_t i, std::span<const std::size_t> atoms) const;

  void check_time(std::size_t i) const;

  std::string describe_atom(std::size_t i, std::size_t atom) const;
  std::string describe(const Event& e) const;

 private:
  std::vector<std::string> state_ids_;
  std::vector<double> times_;
  std::vector<std::vector<std::vector<std::size_t>>> atoms_;
  std::vector<std::vector<std::size_t>> atom_of_;
};

using SpacePtr = std::shared_ptr<const FilteredSpace>;

/// Real-valued map on states, measurable at `time_index`.
class Act {
 public:
  Act() = default;
  /// Throws InvariantError on non-finite values.
  Act(std::size_t time_index, std::vector<double> values);

  static Act constant(const FilteredSpace& space, std::size_t time_index,
                      double value);
  static Act from_atoms(const FilteredSpace& space, std::size_t time_index,
                        std::span<const double> atom_values);
  static Act indicator(const Event& e, std::size_t time_index);

  std::size_t time_index() const noexcept { return time_index_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t state) const { return values_[state]; }
  /// Value on atom k of partitions[time_index].
  double on_atom(const FilteredSpace& space, std::size_t atom) const;
  std::vector<double> atom_values(const FilteredSpace& space) const;

  /// Same values re-tagged at a later (or equal) time index.
  Act at_time(std::size_t time_index) const;
  Act plus(double c) const;
  Act times(double c) const;

  bool operator==(const Act& other) const = default;

 private:
  std::size_t time_index_ = 0;
  std::vector<double> values_;
};

Act operator+(const Act& a, const Act& b);
Act operator-(const Act& a, const Act& b);

/// f * 1_A.
Act restrict(const Act& f, const Event& a);

/// Agrees with f on A and with g elsewhere. Throws PreconditionError when the
/// time indices of f and g differ or A is tagged later than them.
Act paste(const Act& f, const Act& g, const Event& a);

/// Sup-norm distance, optionally restricted to `mask`.
double sup_distance(const Act& a, const Act& b,
                    const std::optional<Event>& mask = std::nullopt);

/// "{a,b}=1 {c}=2" over the atoms of the act's time.
std::string describe(const FilteredSpace& space, const Act& f);

std::vector<Event> atoms(const FilteredSpace& space, std::size_t i);
bool is_measurable(const FilteredSpace& space, std::size_t i, const Act& f,
                   double tol = kMeasureTol);
bool is_measurable(const FilteredSpace& space, std::size_t i, const Event& e);
/// Throws InvariantError naming the first offending atom.
void require_measurable(const FilteredSpace& space, const Act& f,
                        double tol = kMeasureTol);

/// Nonnegative weights on states summing to one.
class ProbabilityMeasure {
 public:
  ProbabilityMeasure() = default;
  explicit ProbabilityMeasure(std::vector<double> weights);
  explicit ProbabilityMeasure(std::initializer_list<double> weights)
      : ProbabilityMeasure(std::vector<double>(weights)) {}
  /// Exact weights; the double weights are derived from them.
  explicit ProbabilityMeasure(std::vector<Rational> exact_weights);

  static ProbabilityMeasure uniform(std::size_t num_states);

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t state) const { return weights_.at(state); }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::optional<std::vector<Rational>>& exact() const noexcept { return exact_; }

  double probability(const Event& e) const;
  double atom_probability(const FilteredSpace& space, std::size_t i,
                          std::size_t atom) const;
  std::vector<double> atom_probabilities(const FilteredSpace& space,
                                         std::size_t i) const;
  /// Same null states.
  bool equivalent_to(const ProbabilityMeasure& other) const;

 private:
  std::vector<double> weights_;
  std::optional<std::vector<Rational>> exact_;
};

struct ConditionalExpectation {
  Act value;
  /// Atoms at the conditioning time with zero probability, filled with 0.
  std::vector<std::size_t> null_atoms;
  Event null_fill;
};

/// E_P[f | F_{t_i}] for f measurable at j >= i. Zero-probability atoms get
/// the value 0 and are listed in the result.
ConditionalExpectation conditional_expectation(const FilteredSpace& space,
                                               const ProbabilityMeasure& p,
                                               const Act& f, std::size_t i);

/// Atom-indexed values of E_P[values | F_{t_i}] without building an Act.
std::vector<double> conditional_atom_values(const FilteredSpace& space,
                                            const ProbabilityMeasure& p,
                                            std::span<const double> values,
                                            std::size_t i);

/// Exact conditional expectation (requires exact weights); values are
/// converted to rationals without rounding.
std::vector<Rational> conditional_atom_values_exact(
    const FilteredSpace& space, const ProbabilityMeasure& p,
    std::span<const Rational> values, std::size_t i);

/// Null sets at time i: a queried event is null iff contained in `maximal`.
struct NullFamily {
  Event maximal;
  std::vector<std::size_t> atoms;

  bool is_null(const Event& e) const { return e.subset_of(maximal); }
  bool is_null_atom(std::size_t atom) const;
};

NullFamily null_events(const FilteredSpace& space, const ProbabilityMeasure& p,
                       std::size_t i);

}  // namespace itp
