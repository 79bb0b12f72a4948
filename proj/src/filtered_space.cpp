#include "itp/filtered_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "itp/errors.hpp"

namespace itp {

// ---------------------------------------------------------------- Event

Event::Event(std::vector<bool> members, std::optional<std::size_t> time_index)
    : members_(std::move(members)), time_index_(time_index) {}

Event Event::none(std::size_t num_states) {
  return Event(std::vector<bool>(num_states, false));
}

Event Event::all(std::size_t num_states) {
  return Event(std::vector<bool>(num_states, true));
}

Event Event::of(std::size_t num_states, std::span<const std::size_t> states,
                std::optional<std::size_t> time_index) {
  std::vector<bool> members(num_states, false);
  for (auto s : states) {
    if (s >= num_states) throw RangeError("event state index out of range");
    members[s] = true;
  }
  return Event(std::move(members), time_index);
}

Event Event::of(std::size_t num_states,
                std::initializer_list<std::size_t> states,
                std::optional<std::size_t> time_index) {
  return of(num_states, std::span<const std::size_t>(states.begin(), states.size()),
            time_index);
}

bool Event::empty() const noexcept {
  return std::none_of(members_.begin(), members_.end(), [](bool b) { return b; });
}

std::size_t Event::count() const noexcept {
  return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

std::vector<std::size_t> Event::states() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < members_.size(); ++s) {
    if (members_[s]) out.push_back(s);
  }
  return out;
}

Event Event::with_time(std::optional<std::size_t> time_index) const {
  return Event(members_, time_index);
}

Event Event::complement() const {
  std::vector<bool> out(members_.size());
  for (std::size_t s = 0; s < members_.size(); ++s) out[s] = !members_[s];
  return Event(std::move(out), time_index_);
}

namespace {

void require_same_size(const Event& a, const Event& b) {
  if (a.num_states() != b.num_states()) {
    throw PreconditionError("events over different state sets");
  }
}

std::optional<std::size_t> later_tag(std::optional<std::size_t> a,
                                     std::optional<std::size_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::max(*a, *b);
}

}  // namespace

Event Event::operator|(const Event& other) const {
  require_same_size(*this, other);
  std::vector<bool> out(members_.size());
  for (std::size_t s = 0; s < members_.size(); ++s) {
    out[s] = members_[s] || other.members_[s];
  }
  return Event(std::move(out), later_tag(time_index_, other.time_index_));
}

Event Event::operator&(const Event& other) const {
  require_same_size(*this, other);
  std::vector<bool> out(members_.size());
  for (std::size_t s = 0; s < members_.size(); ++s) {
    out[s] = members_[s] && other.members_[s];
  }
  return Event(std::move(out), later_tag(time_index_, other.time_index_));
}

Event Event::operator-(const Event& other) const {
  require_same_size(*this, other);
  std::vector<bool> out(members_.size());
  for (std::size_t s = 0; s < members_.size(); ++s) {
    out[s] = members_[s] && !other.members_[s];
  }
  return Event(std::move(out), later_tag(time_index_, other.time_index_));
}

bool Event::subset_of(const Event& other) const {
  require_same_size(*this, other);
  for (std::size_t s = 0; s < members_.size(); ++s) {
    if (members_[s] && !other.members_[s]) return false;
  }
  return true;
}

// ---------------------------------------------------------- FilteredSpace

FilteredSpace::FilteredSpace(
    std::vector<std::string> state_ids, std::vector<double> times,
    std::vector<std::vector<std::vector<std::size_t>>> partitions)
    : state_ids_(std::move(state_ids)), times_(std::move(times)) {
  const std::size_t n = state_ids_.size();
  if (n == 0) throw InvariantError("filtered space needs at least one state");
  {
    std::vector<std::string> sorted = state_ids_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InvariantError("duplicate state identifier");
    }
  }
  if (times_.empty()) throw InvariantError("filtered space needs at least one time");
  if (partitions.size() != times_.size()) {
    throw InvariantError("one partition per time is required");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i - 1] < times_[i])) {
      throw InvariantError("time labels must be strictly increasing");
    }
  }

  atoms_.resize(partitions.size());
  atom_of_.assign(partitions.size(), std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    std::vector<int> seen(n, 0);
    auto& atoms = partitions[i];
    for (auto& atom : atoms) {
      if (atom.empty()) {
        throw InvariantError("partition t=" + std::to_string(i) + " has an empty atom");
      }
      std::sort(atom.begin(), atom.end());
      for (auto s : atom) {
        if (s >= n) throw InvariantError("partition state index out of range");
        if (seen[s]++) {
          throw InvariantError("partition t=" + std::to_string(i) + ": state " +
                               state_ids_[s] + " appears in more than one atom");
        }
      }
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (!seen[s]) {
        throw InvariantError("partition t=" + std::to_string(i) + ": state " +
                             state_ids_[s] + " is not covered");
      }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    atoms_[i] = atoms;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      for (auto s : atoms[k]) atom_of_[i][s] = k;
    }
  }
  if (atoms_[0].size() != 1) {
    throw InvariantError("partition t=0 must be the single atom of all states");
  }
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    for (std::size_t k = 0; k < atoms_[i].size(); ++k) {
      const auto& atom = atoms_[i][k];
      std::size_t parent = atom_of_[i - 1][atom.front()];
      for (auto s : atom) {
        if (atom_of_[i - 1][s] != parent) {
          throw InvariantError("partition t=" + std::to_string(i) + ": atom " +
                               describe_atom(i, k) +
                               " is not contained in a single atom at t=" +
                               std::to_string(i - 1));
        }
      }
    }
  }
}

FilteredSpace FilteredSpace::from_ids(
    std::vector<std::string> state_ids, std::vector<double> times,
    const std::vector<std::vector<std::vector<std::string>>>& partitions) {
  std::map<std::string, std::size_t> index;
  for (std::size_t s = 0; s < state_ids.size(); ++s) index[state_ids[s]] = s;
  std::vector<std::vector<std::vector<std::size_t>>> parts;
  for (const auto& partition : partitions) {
    auto& out = parts.emplace_back();
    for (const auto& atom : partition) {
      auto& a = out.emplace_back();
      for (const auto& id : atom) {
        auto it = index.find(id);
        if (it == index.end()) throw InvariantError("unknown state '" + id + "'");
        a.push_back(it->second);
      }
    }
  }
  return FilteredSpace(std::move(state_ids), std::move(times), std::move(parts));
}

std::optional<std::size_t> FilteredSpace::find_state(std::string_view id) const {
  for (std::size_t s = 0; s < state_ids_.size(); ++s) {
    if (state_ids_[s] == id) return s;
  }
  return std::nullopt;
}

void FilteredSpace::check_time(std::size_t i) const {
  if (i >= times_.size()) {
    throw RangeError("time index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(last_time()) + "]");
  }
}

const std::vector<std::size_t>& FilteredSpace::atom_states(std::size_t i,
                                                           std::size_t atom) const {
  check_time(i);
  if (atom >= atoms_[i].size()) throw RangeError("atom index out of range");
  return atoms_[i][atom];
}

std::size_t FilteredSpace::atom_of(std::size_t i, std::size_t state) const {
  check_time(i);
  return atom_of_[i].at(state);
}

Event FilteredSpace::atom_event(std::size_t i, std::size_t atom) const {
  return Event::of(num_states(), atom_states(i, atom), i);
}

std::size_t FilteredSpace::ancestor(std::size_t j, std::size_t atom,
                                    std::size_t i) const {
  if (i > j) throw PreconditionError("ancestor time must not exceed atom time");
  return atom_of(i, atom_states(j, atom).front());
}

std::vector<std::size_t> FilteredSpace::children(std::size_t i,
                                                 std::size_t atom) const {
  check_time(i + 1);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < atoms_[i + 1].size(); ++k) {
    if (atom_of_[i][atoms_[i + 1][k].front()] == atom) out.push_back(k);
  }
  return out;
}

std::vector<std::size_t> FilteredSpace::atoms_in(std::size_t i,
                                                 const Event& e) const {
  check_time(i);
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < atoms_[i].size(); ++k) {
    const auto& atom = atoms_[i][k];
    bool first = e.contains(atom.front());
    for (auto s : atom) {
      if (e.contains(s) != first) {
        throw InvariantError("event " + describe(e) + " is not measurable at t=" +
                             std::to_string(i));
      }
    }
    if (first) out.push_back(k);
  }
  return out;
}

Event FilteredSpace::union_of(std::size_t i,
                              std::span<const std::size_t> atoms) const {
  std::vector<bool> members(num_states(), false);
  for (auto k : atoms) {
    for (auto s : atom_states(i, k)) members[s] = true;
  }
  return Event(std::move(members), i);
}

std::string FilteredSpace::describe_atom(std::size_t i, std::size_t atom) const {
  std::string out = "{";
  const auto& states = atoms_.at(i).at(atom);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k) out += ",";
    out += state_ids_[states[k]];
  }
  return out + "}";
}

std::string FilteredSpace::describe(const Event& e) const {
  std::string out = "{";
  bool first = true;
  for (auto s : e.states()) {
    if (!first) out += ",";
    first = false;
    out += s < state_ids_.size() ? state_ids_[s] : std::to_string(s);
  }
  return out + "}";
}

// ------------------------------------------------------------------- Act

Act::Act(std::size_t time_index, std::vector<double> values)
    : time_index_(time_index), values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvariantError("act values must be finite");
  }
}

Act Act::constant(const FilteredSpace& space, std::size_t time_index, double value) {
  space.check_time(time_index);
  return Act(time_index, std::vector<double>(space.num_states(), value));
}

Act Act::from_atoms(const FilteredSpace& space, std::size_t time_index,
                    std::span<const double> atom_values) {
  if (atom_values.size() != space.num_atoms(time_index)) {
    throw PreconditionError("one value per atom is required");
  }
  std::vector<double> values(space.num_states());
  for (std::size_t s = 0; s < values.size(); ++s) {
    values[s] = atom_values[space.atom_of(time_index, s)];
  }
  return Act(time_index, std::move(values));
}

Act Act::indicator(const Event& e, std::size_t time_index) {
  std::vector<double> values(e.num_states());
  for (std::size_t s = 0; s < values.size(); ++s) values[s] = e.contains(s) ? 1.0 : 0.0;
  return Act(time_index, std::move(values));
}

double Act::on_atom(const FilteredSpace& space, std::size_t atom) const {
  return values_.at(space.atom_states(time_index_, atom).front());
}

std::vector<double> Act::atom_values(const FilteredSpace& space) const {
  std::vector<double> out(space.num_atoms(time_index_));
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = on_atom(space, k);
  return out;
}

Act Act::at_time(std::size_t time_index) const {
  if (time_index < time_index_) {
    throw PreconditionError("an act can only be re-tagged at a later time");
  }
  return Act(time_index, values_);
}

Act Act::plus(double c) const {
  auto v = values_;
  for (auto& x : v) x += c;
  return Act(time_index_, std::move(v));
}

Act Act::times(double c) const {
  auto v = values_;
  for (auto& x : v) x *= c;
  return Act(time_index_, std::move(v));
}

namespace {

void require_compatible(const Act& a, const Act& b) {
  if (a.time_index() != b.time_index()) {
    throw PreconditionError("acts have incompatible time indices (" +
                            std::to_string(a.time_index()) + " vs " +
                            std::to_string(b.time_index()) + ")");
  }
  if (a.size() != b.size()) throw PreconditionError("acts over different state sets");
}

}  // namespace

Act operator+(const Act& a, const Act& b) {
  require_compatible(a, b);
  std::vector<double> v(a.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = a[s] + b[s];
  return Act(a.time_index(), std::move(v));
}

Act operator-(const Act& a, const Act& b) {
  require_compatible(a, b);
  std::vector<double> v(a.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = a[s] - b[s];
  return Act(a.time_index(), std::move(v));
}

Act restrict(const Act& f, const Event& a) {
  if (a.num_states() != f.size()) throw PreconditionError("event/act size mismatch");
  std::vector<double> v(f.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = a.contains(s) ? f[s] : 0.0;
  return Act(f.time_index(), std::move(v));
}

Act paste(const Act& f, const Act& g, const Event& a) {
  require_compatible(f, g);
  if (a.num_states() != f.size()) throw PreconditionError("event/act size mismatch");
  if (a.time_index() && *a.time_index() > f.time_index()) {
    throw PreconditionError("pasting event is measurable only after the acts' time");
  }
  std::vector<double> v(f.size());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = a.contains(s) ? f[s] : g[s];
  return Act(f.time_index(), std::move(v));
}

double sup_distance(const Act& a, const Act& b, const std::optional<Event>& mask) {
  if (a.size() != b.size()) throw PreconditionError("acts over different state sets");
  double d = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (mask && !mask->contains(s)) continue;
    d = std::max(d, std::fabs(a[s] - b[s]));
  }
  return d;
}

std::string describe(const FilteredSpace& space, const Act& f) {
  std::string out;
  const std::size_t i = f.time_index();
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    if (k) out += " ";
    out += space.describe_atom(i, k) + "=" + format_number(f.on_atom(space, k));
  }
  return out;
}

std::vector<Event> atoms(const FilteredSpace& space, std::size_t i) {
  space.check_time(i);
  std::vector<Event> out;
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) out.push_back(space.atom_event(i, k));
  return out;
}

bool is_measurable(const FilteredSpace& space, std::size_t i, const Act& f, double tol) {
  space.check_time(i);
  if (f.size() != space.num_states()) return false;
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    const auto& states = space.atom_states(i, k);
    double first = f[states.front()];
    for (auto s : states) {
      if (std::fabs(f[s] - first) > tol) return false;
    }
  }
  return true;
}

bool is_measurable(const FilteredSpace& space, std::size_t i, const Event& e) {
  space.check_time(i);
  if (e.num_states() != space.num_states()) return false;
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    const auto& states = space.atom_states(i, k);
    bool first = e.contains(states.front());
    for (auto s : states) {
      if (e.contains(s) != first) return false;
    }
  }
  return true;
}

void require_measurable(const FilteredSpace& space, const Act& f, double tol) {
  const std::size_t i = f.time_index();
  space.check_time(i);
  if (f.size() != space.num_states()) {
    throw InvariantError("act has " + std::to_string(f.size()) + " values, space has " +
                         std::to_string(space.num_states()) + " states");
  }
  for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
    const auto& states = space.atom_states(i, k);
    double first = f[states.front()];
    for (auto s : states) {
      if (std::fabs(f[s] - first) > tol) {
        throw InvariantError("act is not constant on atom " + space.describe_atom(i, k) +
                             " at t=" + std::to_string(i));
      }
    }
  }
}

// ---------------------------------------------------- ProbabilityMeasure

namespace {

void validate_weights(const std::vector<double>& w) {
  if (w.empty()) throw InvariantError("probability measure needs at least one state");
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw InvariantError("probability weights must be finite and nonnegative");
    }
    sum += x;
  }
  if (std::fabs(sum - 1.0) > kMeasureTol) {
    throw InvariantError("probability weights sum to " + format_number(sum) +
                         ", expected 1");
  }
}

}  // namespace

ProbabilityMeasure::ProbabilityMeasure(std::vector<double> weights)
    : weights_(std::move(weights)) {
  validate_weights(weights_);
}

ProbabilityMeasure::ProbabilityMeasure(std::vector<Rational> exact_weights) {
  Rational sum = 0;
  for (const auto& r : exact_weights) {
    if (r < 0) throw InvariantError("probability weights must be nonnegative");
    sum += r;
  }
  if (sum != 1) {
    throw InvariantError("exact probability weights sum to " + format_rational(sum) +
                         ", expected 1");
  }
  weights_.reserve(exact_weights.size());
  for (const auto& r : exact_weights) weights_.push_back(to_double(r));
  validate_weights(weights_);
  exact_ = std::move(exact_weights);
}

ProbabilityMeasure ProbabilityMeasure::uniform(std::size_t num_states) {
  std::vector<Rational> w(num_states, Rational(1, static_cast<long>(num_states)));
  return ProbabilityMeasure(std::move(w));
}

double ProbabilityMeasure::probability(const Event& e) const {
  if (e.num_states() != weights_.size()) throw PreconditionError("event/measure size mismatch");
  double p = 0.0;
  for (std::size_t s = 0; s < weights_.size(); ++s) {
    if (e.contains(s)) p += weights_[s];
  }
  return p;
}

double ProbabilityMeasure::atom_probability(const FilteredSpace& space, std::size_t i,
                                            std::size_t atom) const {
  double p = 0.0;
  for (auto s : space.atom_states(i, atom)) p += weights_.at(s);
  return p;
}

std::vector<double> ProbabilityMeasure::atom_probabilities(const FilteredSpace& space,
                                                           std::size_t i) const {
  std::vector<double> out(space.num_atoms(i), 0.0);
  for (std::size_t s = 0; s < weights_.size(); ++s) out[space.atom_of(i, s)] += weights_[s];
  return out;
}

bool ProbabilityMeasure::equivalent_to(const ProbabilityMeasure& other) const {
  if (other.size() != size()) return false;
  for (std::size_t s = 0; s < size(); ++s) {
    if ((weights_[s] > 0.0) != (other.weights_[s] > 0.0)) return false;
  }
  return true;
}

// ------------------------------------------------ conditional expectation

std::vector<double> conditional_atom_values(const FilteredSpace& space,
                                            const ProbabilityMeasure& p,
                                            std::span<const double> values,
                                            std::size_t i) {
  space.check_time(i);
  if (values.size() != space.num_states() || p.size() != space.num_states()) {
    throw PreconditionError("conditional expectation: size mismatch");
  }
  const std::size_t m = space.num_atoms(i);
  std::vector<double> mass(m, 0.0);
  std::vector<double> sum(m, 0.0);
  for (std::size_t s = 0; s < values.size(); ++s) {
    const double w = p.weight(s);
    if (w == 0.0) continue;
    const std::size_t k = space.atom_of(i, s);
    mass[k] += w;
    sum[k] += w * values[s];
  }
  for (std::size_t k = 0; k < m; ++k) sum[k] = mass[k] > 0.0 ? sum[k] / mass[k] : 0.0;
  return sum;
}

ConditionalExpectation conditional_expectation(const FilteredSpace& space,
                                               const ProbabilityMeasure& p,
                                               const Act& f, std::size_t i) {
  if (i > f.time_index()) {
    throw PreconditionError("conditioning time exceeds the act's time");
  }
  auto atom_vals = conditional_atom_values(space, p, f.values(), i);
  auto mass = p.atom_probabilities(space, i);
  ConditionalExpectation out;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (mass[k] == 0.0) out.null_atoms.push_back(k);
  }
  out.value = Act::from_atoms(space, i, atom_vals);
  out.null_fill = space.union_of(i, out.null_atoms);
  return out;
}

std::vector<Rational> conditional_atom_values_exact(const FilteredSpace& space,
                                                    const ProbabilityMeasure& p,
                                                    std::span<const Rational> values,
                                                    std::size_t i) {
  if (!p.exact()) throw PreconditionError("measure has no exact weights");
  const auto& w = *p.exact();
  const std::size_t m = space.num_atoms(i);
  std::vector<Rational> mass(m, Rational(0));
  std::vector<Rational> sum(m, Rational(0));
  for (std::size_t s = 0; s < values.size(); ++s) {
    const std::size_t k = space.atom_of(i, s);
    mass[k] += w[s];
    sum[k] += w[s] * values[s];
  }
  for (std::size_t k = 0; k < m; ++k) {
    sum[k] = mass[k] != 0 ? Rational(sum[k] / mass[k]) : Rational(0);
  }
  return sum;
}

// ------------------------------------------------------------ null events

bool NullFamily::is_null_atom(std::size_t atom) const {
  return std::find(atoms.begin(), atoms.end(), atom) != atoms.end();
}

NullFamily null_events(const FilteredSpace& space, const ProbabilityMeasure& p,
                       std::size_t i) {
  NullFamily out;
  auto mass = p.atom_probabilities(space, i);
  for (std::size_t k = 0; k < mass.size(); ++k) {
    if (mass[k] == 0.0) out.atoms.push_back(k);
  }
  out.maximal = space.union_of(i, out.atoms);
  return out;
}

}  // namespace itp
