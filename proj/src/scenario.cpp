#include "itp/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "itp/errors.hpp"

namespace itp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Token with its 1-based column in the source line.
struct Piece {
  std::string_view text;
  std::size_t column = 1;
};

Piece trimmed(std::string_view s, std::size_t column) {
  std::size_t lead = 0;
  while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead]))) ++lead;
  return {trim(s), column + lead};
}

std::vector<Piece> split(Piece p, char sep) {
  std::vector<Piece> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= p.text.size(); ++k) {
    if (k == p.text.size() || p.text[k] == sep) {
      out.push_back(trimmed(p.text.substr(start, k - start), p.column + start));
      start = k + 1;
    }
  }
  return out;
}

class CurveParser {
 public:
  CurveParser(std::string_view text, std::size_t line, std::size_t column)
      : s_(text), line_(line), column_(column) {}

  MonotoneCurve parse() {
    skip();
    const std::string kind = word();
    MonotoneCurve c;
    if (kind == "identity") {
      c = MonotoneCurve::identity();
    } else if (kind == "linear") {
      c = wrap([&] { return MonotoneCurve::linear(single()); });
    } else if (kind == "exp") {
      c = wrap([&] { return MonotoneCurve::exponential(single()); });
    } else if (kind == "power") {
      c = wrap([&] { return MonotoneCurve::power(single()); });
    } else if (kind == "pl") {
      expect('(');
      std::vector<std::pair<double, double>> pts;
      do {
        expect('(');
        double x = number();
        expect(',');
        double y = number();
        expect(')');
        pts.emplace_back(x, y);
      } while (accept(','));
      expect(')');
      c = wrap([&] { return MonotoneCurve::piecewise_linear(pts); });
    } else {
      fail(kind.empty() ? "expected a curve kind" : "unknown curve kind '" + kind + "'");
    }
    while (true) {
      skip();
      if (pos_ == s_.size()) break;
      const std::size_t at = pos_;
      const std::string mod = word();
      if (mod == "in") {
        double b = single();
        c = wrap([&] { return c.scaled_input(b); }, at);
      } else if (mod == "out") {
        double k = single();
        c = wrap([&] { return c.scaled_output(k); }, at);
      } else if (mod == "jump") {
        expect('(');
        Jump j;
        j.at = number();
        expect(',');
        j.left_gap = number();
        expect(',');
        j.right_gap = number();
        expect(')');
        c = wrap([&] { return c.with_jump(j); }, at);
      } else {
        pos_ = at;
        fail("unexpected text after curve");
      }
    }
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::optional<std::size_t> at = {}) const {
    throw ParseError(line_, column_ + at.value_or(pos_), what);
  }

  template <typename Fn>
  MonotoneCurve wrap(Fn&& fn, std::size_t at = 0) {
    try {
      return fn();
    } catch (const InvariantError& e) {
      fail(e.what(), at);
    }
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  double number() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    auto v = parse_double(s_.substr(start, pos_ - start));
    if (!v) fail("malformed number '" + std::string(s_.substr(start, pos_ - start)) + "'", start);
    return *v;
  }

  double single() {
    expect('(');
    double v = number();
    expect(')');
    return v;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t column_;
  std::size_t pos_ = 0;
};

struct Line {
  std::size_t number = 0;
  Piece key;
  Piece value;
};

struct Section {
  std::size_t line = 0;
  std::string kind;
  std::string label;  // act name
  std::map<std::string, Piece> args;
  std::vector<Line> lines;
};

std::vector<Section> sections_of(std::string_view text) {
  std::vector<Section> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++number;
    start = end + 1;
    Piece line = trimmed(raw, 1);
    if (line.text.empty() || line.text.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (line.text.front() == '[') {
      if (line.text.back() != ']') {
        throw ParseError(number, line.column + line.text.size(), "expected ']'");
      }
      Piece inner = trimmed(line.text.substr(1, line.text.size() - 2), line.column + 1);
      Section sec;
      sec.line = number;
      bool first = true;
      for (auto& tok : split(inner, ' ')) {
        if (tok.text.empty()) continue;
        if (first) {
          sec.kind = std::string(tok.text);
          first = false;
          continue;
        }
        auto eq = tok.text.find('=');
        if (eq == std::string_view::npos) {
          if (!sec.label.empty()) throw ParseError(number, tok.column, "unexpected token");
          sec.label = std::string(tok.text);
        } else {
          sec.args[std::string(tok.text.substr(0, eq))] = {tok.text.substr(eq + 1),
                                                           tok.column + eq + 1};
        }
      }
      if (sec.kind.empty()) throw ParseError(number, line.column, "empty section header");
      out.push_back(std::move(sec));
    } else {
      if (out.empty()) throw ParseError(number, line.column, "text before the first section");
      auto eq = line.text.find('=');
      if (eq == std::string_view::npos) throw ParseError(number, line.column, "expected 'key = value'");
      Line l;
      l.number = number;
      l.key = trimmed(line.text.substr(0, eq), line.column);
      l.value = trimmed(line.text.substr(eq + 1), line.column + eq + 1);
      if (l.key.text.empty()) throw ParseError(number, line.column, "empty key");
      out.back().lines.push_back(l);
    }
    if (end == text.size()) break;
  }
  return out;
}

std::size_t parse_index(Piece p, std::size_t line) {
  std::size_t v = 0;
  if (p.text.empty()) throw ParseError(line, p.column, "expected an index");
  for (char c : p.text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError(line, p.column, "expected an index, got '" + std::string(p.text) + "'");
    }
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  return v;
}

double parse_value(Piece p, std::size_t line) {
  auto v = parse_double(p.text);
  if (!v) throw ParseError(line, p.column, "malformed number '" + std::string(p.text) + "'");
  return *v;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += sep;
    out += v[k];
  }
  return out;
}

std::string atom_key(const FilteredSpace& space, std::size_t i, std::size_t atom) {
  std::vector<std::string> ids;
  for (auto s : space.atom_states(i, atom)) ids.push_back(space.state_id(s));
  return join(ids, ", ");
}

/// Atom at time i named by a comma-separated state list.
std::size_t atom_of_key(const FilteredSpace& space, std::size_t i, const Line& l) {
  std::vector<std::size_t> states;
  for (auto& p : split(l.key, ',')) {
    auto s = space.find_state(p.text);
    if (!s) throw ParseError(l.number, p.column, "unknown state '" + std::string(p.text) + "'");
    states.push_back(*s);
  }
  std::sort(states.begin(), states.end());
  const std::size_t atom = space.atom_of(i, states.front());
  if (space.atom_states(i, atom) != states) {
    throw ParseError(l.number, l.key.column,
                     "'" + std::string(l.key.text) + "' is not an atom at t=" + std::to_string(i) +
                         " (atom is {" + atom_key(space, i, atom) + "})");
  }
  return atom;
}

}  // namespace

MonotoneCurve parse_curve(std::string_view text) { return CurveParser(text, 1, 1).parse(); }

const ProbabilityMeasure& ScenarioSpec::measure(std::string_view v) const {
  const std::string_view want = v.empty() ? std::string_view(variant) : v;
  for (const auto& m : measures) {
    if (m.name == want) return m.measure;
  }
  throw PreconditionError("unknown measure variant '" + std::string(want) + "'");
}

const Act& ScenarioSpec::act(std::string_view n) const {
  for (const auto& a : acts) {
    if (a.name == n) return a.act;
  }
  throw PreconditionError("unknown act '" + std::string(n) + "'");
}

Representation ScenarioSpec::representation(std::string_view v) const {
  return Representation(space, measure(v), field);
}

ScenarioSpec parse_scenario(std::string_view text) {
  auto sections = sections_of(text);
  if (sections.empty()) throw ParseError(1, 1, "empty scenario");
  ScenarioSpec spec;
  const Section* space_sec = nullptr;
  for (const auto& sec : sections) {
    if (sec.kind == "space") {
      if (space_sec) throw ParseError(sec.line, 1, "duplicate [space] section");
      space_sec = &sec;
    }
  }
  if (!space_sec) throw ParseError(sections.front().line, 1, "missing [space] section");
  {
    std::vector<std::string> ids;
    std::vector<double> times;
    std::map<std::size_t, const Line*> parts;
    for (const auto& l : space_sec->lines) {
      const std::string key(l.key.text);
      if (key == "states") {
        for (auto& p : split(l.value, ',')) {
          if (p.text.empty()) throw ParseError(l.number, p.column, "empty state identifier");
          ids.emplace_back(p.text);
        }
      } else if (key == "times") {
        for (auto& p : split(l.value, ',')) times.push_back(parse_value(p, l.number));
      } else if (key.rfind("partition.", 0) == 0) {
        Piece idx{l.key.text.substr(10), l.key.column + 10};
        parts[parse_index(idx, l.number)] = &l;
      } else {
        throw ParseError(l.number, l.key.column, "unknown [space] key '" + key + "'");
      }
    }
    if (ids.empty()) throw ParseError(space_sec->line, 1, "[space] needs states");
    if (times.empty()) throw ParseError(space_sec->line, 1, "[space] needs times");
    std::map<std::string, std::size_t> index;
    for (std::size_t s = 0; s < ids.size(); ++s) index[ids[s]] = s;
    std::vector<std::vector<std::vector<std::size_t>>> partitions(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      auto it = parts.find(i);
      if (it == parts.end()) {
        if (i == 0) {
          partitions[0].emplace_back();
          for (std::size_t s = 0; s < ids.size(); ++s) partitions[0].back().push_back(s);
          continue;
        }
        throw ParseError(space_sec->line, 1, "missing partition." + std::to_string(i));
      }
      const Line& l = *it->second;
      for (auto& atom : split(l.value, '|')) {
        partitions[i].emplace_back();
        for (auto& p : split(atom, ',')) {
          auto f = index.find(std::string(p.text));
          if (f == index.end()) {
            throw ParseError(l.number, p.column, "unknown state '" + std::string(p.text) + "'");
          }
          partitions[i].back().push_back(f->second);
        }
      }
    }
    for (const auto& [i, l] : parts) {
      if (i >= times.size()) {
        throw ParseError(l->number, l->key.column, "partition index beyond the last time");
      }
    }
    spec.space = std::make_shared<const FilteredSpace>(ids, times, partitions);
  }
  const auto& space = *spec.space;
  std::vector<std::vector<std::optional<MonotoneCurve>>> curves(space.num_times());
  for (std::size_t i = 0; i < space.num_times(); ++i) curves[i].resize(space.num_atoms(i));
  std::set<std::string> seen_kinds;

  for (const auto& sec : sections) {
    if (sec.kind == "space") continue;
    if (sec.kind == "scenario") {
      for (const auto& l : sec.lines) {
        const std::string key(l.key.text);
        if (key == "name") {
          spec.name = l.value.text;
        } else if (key == "variant") {
          spec.variant = l.value.text;
        } else if (key == "note") {
          spec.note = l.value.text;
        } else {
          throw ParseError(l.number, l.key.column, "unknown [scenario] key '" + key + "'");
        }
      }
    } else if (sec.kind == "measure") {
      MeasureVariant mv;
      auto it = sec.args.find("variant");
      mv.name = it == sec.args.end() ? "default" : std::string(it->second.text);
      for (const auto& m : spec.measures) {
        if (m.name == mv.name) throw ParseError(sec.line, 1, "duplicate measure variant '" + mv.name + "'");
      }
      std::vector<std::optional<Rational>> w(space.num_states());
      for (const auto& l : sec.lines) {
        auto s = space.find_state(l.key.text);
        if (!s) throw ParseError(l.number, l.key.column, "unknown state '" + std::string(l.key.text) + "'");
        if (w[*s]) throw ParseError(l.number, l.key.column, "duplicate weight");
        w[*s] = parse_rational(l.value.text);
        if (!w[*s]) throw ParseError(l.number, l.value.column, "malformed weight '" + std::string(l.value.text) + "'");
      }
      std::vector<Rational> exact;
      for (std::size_t s = 0; s < w.size(); ++s) {
        if (!w[s]) throw InvariantError("measure '" + mv.name + "' has no weight for state " + space.state_id(s));
        exact.push_back(*w[s]);
      }
      try {
        mv.measure = ProbabilityMeasure(std::move(exact));
      } catch (const InvariantError& e) {
        throw InvariantError("measure '" + mv.name + "': " + e.what());
      }
      spec.measures.push_back(std::move(mv));
    } else if (sec.kind == "utility") {
      auto it = sec.args.find("t");
      if (it == sec.args.end()) throw ParseError(sec.line, 1, "[utility] needs t=<index>");
      const std::size_t i = parse_index(it->second, sec.line);
      if (i >= space.num_times()) throw ParseError(sec.line, it->second.column, "time index out of range");
      for (const auto& l : sec.lines) {
        const std::size_t atom = atom_of_key(space, i, l);
        if (curves[i][atom]) throw ParseError(l.number, l.key.column, "duplicate curve for this atom");
        curves[i][atom] = CurveParser(l.value.text, l.number, l.value.column).parse();
      }
    } else if (sec.kind == "act") {
      if (sec.label.empty()) throw ParseError(sec.line, 1, "[act] needs a name");
      auto it = sec.args.find("t");
      if (it == sec.args.end()) throw ParseError(sec.line, 1, "[act] needs t=<index>");
      const std::size_t i = parse_index(it->second, sec.line);
      if (i >= space.num_times()) throw ParseError(sec.line, it->second.column, "time index out of range");
      for (const auto& a : spec.acts) {
        if (a.name == sec.label) throw ParseError(sec.line, 1, "duplicate act '" + sec.label + "'");
      }
      std::vector<std::optional<double>> v(space.num_atoms(i));
      for (const auto& l : sec.lines) {
        const std::size_t atom = atom_of_key(space, i, l);
        if (v[atom]) throw ParseError(l.number, l.key.column, "duplicate value for this atom");
        v[atom] = parse_value(l.value, l.number);
      }
      std::vector<double> vals;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k]) {
          throw InvariantError("act '" + sec.label + "' has no value on atom " + space.describe_atom(i, k));
        }
        vals.push_back(*v[k]);
      }
      spec.acts.push_back({sec.label, Act::from_atoms(space, i, vals)});
    } else if (sec.kind == "strategies") {
      if (spec.strategies) throw ParseError(sec.line, 1, "duplicate [strategies] section");
      StrategySpec st;
      for (const auto& l : sec.lines) {
        const std::string key(l.key.text);
        if (key == "wealth") {
          st.wealth = parse_value(l.value, l.number);
        } else if (key == "price") {
          for (auto& p : split(l.value, ',')) st.price.emplace_back(p.text);
        } else if (key == "fractions") {
          for (auto& p : split(l.value, ',')) st.fractions.push_back(parse_value(p, l.number));
        } else if (key == "initial_utility") {
          st.initial_utility = CurveParser(l.value.text, l.number, l.value.column).parse();
        } else {
          throw ParseError(l.number, l.key.column, "unknown [strategies] key '" + key + "'");
        }
      }
      spec.strategies = std::move(st);
    } else {
      throw ParseError(sec.line, 2, "unknown section '" + sec.kind + "'");
    }
  }

  if (spec.measures.empty()) throw InvariantError("scenario has no [measure] section");
  if (spec.variant.empty()) spec.variant = spec.measures.front().name;
  (void)spec.measure();
  std::vector<std::vector<MonotoneCurve>> field(space.num_times());
  for (std::size_t i = 0; i < space.num_times(); ++i) {
    for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
      if (!curves[i][k]) {
        throw InvariantError("no utility curve for atom " + space.describe_atom(i, k) +
                             " at t=" + std::to_string(i));
      }
      field[i].push_back(*curves[i][k]);
    }
  }
  spec.field = UtilityField(spec.space, std::move(field));
  if (spec.strategies) {
    const auto& st = *spec.strategies;
    if (st.price.size() != space.num_times()) {
      throw InvariantError("strategies: price needs one act per time");
    }
    for (std::size_t t = 0; t < st.price.size(); ++t) {
      const Act& p = spec.act(st.price[t]);
      if (p.time_index() != t) {
        throw InvariantError("strategies: price act '" + st.price[t] + "' is not at t=" +
                             std::to_string(t));
      }
    }
  }
  return spec;
}

std::string format_scenario(const ScenarioSpec& spec) {
  const auto& space = *spec.space;
  std::ostringstream out;
  out << "[scenario]\n";
  out << "name = " << spec.name << "\n";
  out << "variant = " << spec.variant << "\n";
  if (!spec.note.empty()) out << "note = " << spec.note << "\n";
  out << "\n[space]\n";
  out << "states = " << join(space.state_ids(), ", ") << "\n";
  std::vector<std::string> times;
  for (double t : space.time_labels()) times.push_back(format_number(t));
  out << "times = " << join(times, ", ") << "\n";
  for (std::size_t i = 0; i < space.num_times(); ++i) {
    std::vector<std::string> atoms;
    for (std::size_t k = 0; k < space.num_atoms(i); ++k) atoms.push_back(atom_key(space, i, k));
    out << "partition." << i << " = " << join(atoms, " | ") << "\n";
  }
  for (const auto& m : spec.measures) {
    out << "\n[measure variant=" << m.name << "]\n";
    for (std::size_t s = 0; s < space.num_states(); ++s) {
      out << space.state_id(s) << " = "
          << (m.measure.exact() ? format_rational((*m.measure.exact())[s])
                                : format_number(m.measure.weight(s)))
          << "\n";
    }
  }
  for (std::size_t i = 0; i < space.num_times(); ++i) {
    out << "\n[utility t=" << i << "]\n";
    for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
      out << atom_key(space, i, k) << " = " << spec.field.curve(i, k).to_string() << "\n";
    }
  }
  for (const auto& a : spec.acts) {
    const std::size_t i = a.act.time_index();
    out << "\n[act " << a.name << " t=" << i << "]\n";
    for (std::size_t k = 0; k < space.num_atoms(i); ++k) {
      out << atom_key(space, i, k) << " = " << format_number(a.act.on_atom(space, k)) << "\n";
    }
  }
  if (spec.strategies) {
    const auto& st = *spec.strategies;
    out << "\n[strategies]\n";
    out << "wealth = " << format_number(st.wealth) << "\n";
    out << "price = " << join(st.price, ", ") << "\n";
    std::vector<std::string> fr;
    for (double f : st.fractions) fr.push_back(format_number(f));
    out << "fractions = " << join(fr, ", ") << "\n";
    if (st.initial_utility) out << "initial_utility = " << st.initial_utility->to_string() << "\n";
  }
  return out.str();
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write scenario file " + path.string());
  out << format_scenario(spec);
}

}  // namespace itp
