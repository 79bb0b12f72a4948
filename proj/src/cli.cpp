#include "itp/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "itp/axioms.hpp"
#include "itp/demos.hpp"
#include "itp/errors.hpp"
#include "itp/random_models.hpp"
#include "itp/recovery.hpp"
#include "itp/scenario.hpp"

namespace itp {

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;

struct Options {
  std::string scenario;
  std::string other;
  std::string variant;
  std::string format = "text";
  std::string grid;
  std::string g;
  std::string f;
  std::string out;
  std::string fault;
  std::string which;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t count = 100;
  int s = -1;
  int t = -1;
  int level = -1;
};

/// Key/value rows printed as "key: value" or "key<TAB>value".
class Report {
 public:
  explicit Report(const std::string& format) : tsv_(format == "tsv") {}
  void row(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void print(std::ostream& out) const {
    for (const auto& [k, v] : rows_) out << k << (tsv_ ? "\t" : ": ") << v << "\n";
  }

 private:
  bool tsv_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto v = parse_double(item);
    if (!v) throw PreconditionError("malformed grid value '" + item + "'");
    out.push_back(*v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScenarioSpec need_scenario(const Options& o) {
  if (o.scenario.empty()) throw PreconditionError("--scenario is required");
  return load_scenario(o.scenario);
}

std::string atom_list(const FilteredSpace& space, std::size_t i, const Event& e) {
  std::string out;
  for (auto k : space.atoms_in(i, e)) {
    if (!out.empty()) out += " ";
    out += space.describe_atom(i, k);
  }
  return out.empty() ? "(none)" : out;
}

std::size_t time_of(int flag, std::size_t fallback, const FilteredSpace& space, const char* name) {
  if (flag < 0) return fallback;
  const auto t = static_cast<std::size_t>(flag);
  if (t >= space.num_times()) {
    throw PreconditionError(std::string("--") + name + " is beyond the last time");
  }
  return t;
}

int cmd_cce(const Options& o, std::ostream& out) {
  auto spec = need_scenario(o);
  auto rep = spec.representation(o.variant);
  const Act& f = spec.act(o.f);
  const std::size_t t = time_of(o.t, f.time_index(), rep.space(), "t");
  const std::size_t s = time_of(o.s, 0, rep.space(), "s");
  Act c = cce(rep, s, t, f, o.tol);
  Report r(o.format);
  r.row("cce", "t" + std::to_string(s) + " <- t" + std::to_string(t) + " of " + o.f);
  for (std::size_t k = 0; k < rep.space().num_atoms(s); ++k) {
    r.row(rep.space().describe_atom(s, k), format_number(c.on_atom(rep.space(), k)));
  }
  r.print(out);
  return kOk;
}

int cmd_compare(const Options& o, std::ostream& out) {
  auto spec = need_scenario(o);
  auto rep = spec.representation(o.variant);
  const Act& g = spec.act(o.g);
  const Act& f = spec.act(o.f);
  const std::size_t t = time_of(o.t, f.time_index(), rep.space(), "t");
  const std::size_t s = time_of(o.s, g.time_index(), rep.space(), "s");
  Verdict v = compare(rep, s, t, g, f, o.tol);
  out << to_string(v.tag) << "\n";
  Report r(o.format);
  r.row("equivalent on", atom_list(rep.space(), s, v.parts.a));
  r.row("g preferred on", atom_list(rep.space(), s, v.parts.b));
  r.row("f preferred on", atom_list(rep.space(), s, v.parts.c));
  r.print(out);
  return kOk;
}

int cmd_semigroup(const Options& o, std::ostream& out) {
  auto spec = need_scenario(o);
  auto rep = spec.representation(o.variant);
  const auto& space = rep.space();
  if (space.last_time() < 2) throw PreconditionError("semigroup needs at least three times");
  std::mt19937_64 rng(o.seed);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t n = 0; n < o.count; ++n) {
    for (std::size_t v = 2; v <= space.last_time(); ++v) {
      Act f = random_act(space, v, rng);
      for (std::size_t s = 0; s + 1 < v; ++s) {
        for (std::size_t t = s + 1; t < v; ++t) {
          try {
            worst = std::max(worst, semigroup_residual(rep, s, t, v, f, o.tol));
            ++checked;
          } catch (const RangeError&) {
          }
        }
      }
    }
  }
  const bool ok = worst <= 10.0 * o.tol;
  Report r(o.format);
  r.row("triples", std::to_string(checked));
  r.row("residual", format_number(worst));
  r.row("bound", format_number(10.0 * o.tol));
  r.row("result", ok ? "PASS" : "FAIL");
  r.print(out);
  return ok ? kOk : kCheckFailed;
}

int cmd_axioms(const Options& o, std::ostream& out) {
  auto spec = need_scenario(o);
  auto rep = spec.representation(o.variant);
  ActGrid grid;
  if (!o.grid.empty()) grid.values = parse_grid(o.grid);
  std::unique_ptr<PreferenceOracle> oracle;
  const auto& space = rep.space();
  std::vector<std::size_t> levels;
  if (o.level >= 0) {
    levels.push_back(time_of(o.level, 0, space, "level"));
  } else {
    for (std::size_t i = 0; i < space.last_time(); ++i) levels.push_back(i);
  }
  if (o.fault.empty()) {
    oracle = std::make_unique<InducedOracle>(rep, o.tol);
  } else {
    const std::vector<FaultKind> kinds{FaultKind::Intransitive, FaultKind::Degenerate,
                                       FaultKind::FlatSegment, FaultKind::NonAdditive,
                                       FaultKind::Jump};
    auto it = std::find_if(kinds.begin(), kinds.end(),
                           [&](FaultKind k) { return to_string(k) == o.fault; });
    if (it == kinds.end()) throw PreconditionError("unknown fault '" + o.fault + "'");
    oracle = make_fault_oracle(*it, rep, levels.front());
  }
  AxiomChecker checker(*oracle, grid);
  bool ok = true;
  for (auto i : levels) {
    std::vector<AxiomReport> reports{checker.check_T(i), checker.check_M(i), checker.check_ST(i)};
    for (const char* style : {"shift", "atomwise", "random"}) {
      reports.push_back(checker.check_C_grid(i, style));
    }
    for (const auto& rep_i : reports) {
      ok = ok && rep_i.pass();
      if (o.format == "tsv") {
        for (const auto& c : rep_i.clauses) {
          out << c.id << "\t" << i << "\t" << (c.pass ? "PASS" : "FAIL") << "\t" << c.queries
              << "\t" << c.counterexample << "\n";
        }
      } else {
        out << rep_i.to_text();
      }
    }
  }
  out << (ok ? "all clauses pass" : "some clauses fail") << "\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_recover(const Options& o, std::ostream& out) {
  auto spec = need_scenario(o);
  auto rep = spec.representation(o.variant);
  InducedOracle oracle(rep, o.tol);
  RecoveryOptions opt;
  if (!o.grid.empty()) opt.grid = parse_grid(o.grid);
  Recovered rec = recover(oracle, rep.u0(), opt);
  auto uq = check_relative_uniqueness(rep, rec.rep, opt.grid, std::max(1e-6, o.tol));
  Report r(o.format);
  for (const auto& st : rec.steps) {
    const std::string at = "t" + std::to_string(st.level);
    r.row(at + " additivity residual", format_number(st.debreu_residual));
    r.row(at + " parent mismatch", format_number(st.parent_mismatch));
    for (std::size_t k = 0; k < st.atom_probability.size(); ++k) {
      r.row(at + " P" + rec.rep.space().describe_atom(st.level, k),
            format_number(st.atom_probability[k]));
    }
  }
  r.row("uniqueness deviation", format_number(uq.deviation));
  r.row("result", uq.ok ? "PASS" : "FAIL");
  r.print(out);
  if (!o.out.empty()) {
    ScenarioSpec outspec;
    outspec.name = spec.name + "-recovered";
    outspec.variant = "recovered";
    outspec.space = spec.space;
    std::vector<Rational> w;
    for (double x : rec.rep.measure().weights()) w.emplace_back(x);
    Rational total = 0;
    for (const auto& x : w) total += x;
    for (auto& x : w) x /= total;
    outspec.measures.push_back({"recovered", ProbabilityMeasure(std::move(w))});
    outspec.field = UtilityField(spec.space, [&] {
      std::vector<std::vector<MonotoneCurve>> c(spec.space->num_times());
      for (std::size_t i = 0; i < c.size(); ++i) {
        for (std::size_t k = 0; k < spec.space->num_atoms(i); ++k) {
          c[i].push_back(rec.rep.field().curve(i, k));
        }
      }
      return c;
    }());
    save_scenario(outspec, o.out);
  }
  return uq.ok ? kOk : kCheckFailed;
}

int cmd_uniqueness(const Options& o, std::ostream& out) {
  auto a = need_scenario(o);
  if (o.other.empty()) throw PreconditionError("--other is required");
  auto b = load_scenario(o.other);
  std::vector<double> grid = o.grid.empty() ? default_recovery_grid() : parse_grid(o.grid);
  auto res =
      check_relative_uniqueness(a.representation(o.variant), b.representation(), grid, o.tol);
  Report r(o.format);
  r.row("equivalent measures", res.witness_state ? "no" : "yes");
  r.row("deviation", format_number(res.deviation));
  if (!res.detail.empty()) r.row("detail", res.detail);
  r.row("result", res.ok ? "PASS" : "FAIL");
  r.print(out);
  return res.ok ? kOk : kCheckFailed;
}

int cmd_example(const Options& o, std::ostream& out) {
  if (o.which == "villa") {
    ScenarioSpec spec = o.scenario.empty() ? villa_scenario() : load_scenario(o.scenario);
    out << run_villa(spec, o.variant).text;
    return kOk;
  }
  if (o.which == "dpp") {
    auto r = run_dpp(need_scenario(o), o.variant, o.tol);
    out << r.text;
    return r.dominance && r.equality ? kOk : kCheckFailed;
  }
  if (o.which == "forward") {
    auto r = run_forward_check(need_scenario(o), o.variant, o.tol);
    out << r.text;
    return r.pass() ? kOk : kCheckFailed;
  }
  throw PreconditionError("unknown example '" + o.which + "' (villa, dpp or forward)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"intertemporal preferences: certainty equivalents, axioms and recovery", "itp"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario file");
    sub->add_option("--variant", o.variant, "measure variant");
    sub->add_option("--tol", o.tol, "tolerance")->capture_default_str();
    sub->add_option("--format", o.format, "text or tsv")
        ->check(CLI::IsMember({"text", "tsv"}))
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sub->add_option("--grid", o.grid, "comma-separated outcome grid");
  };
  auto* cce_cmd = app.add_subcommand("cce", "conditional certainty equivalent of an act");
  common(cce_cmd);
  cce_cmd->add_option("--f", o.f, "act name")->required();
  cce_cmd->add_option("--s", o.s, "conditioning time");
  cce_cmd->add_option("--t", o.t, "payment time");
  auto* cmp = app.add_subcommand("compare", "verdict of g at s against f at t");
  common(cmp);
  cmp->add_option("--g", o.g, "act at s")->required();
  cmp->add_option("--f", o.f, "act at t")->required();
  cmp->add_option("--s", o.s, "time of g");
  cmp->add_option("--t", o.t, "time of f");
  auto* semi = app.add_subcommand("semigroup", "semigroup residual on random acts");
  common(semi);
  semi->add_option("--count", o.count, "acts per final time")->capture_default_str();
  auto* ax = app.add_subcommand("axioms", "check the axioms on the induced oracle");
  common(ax);
  ax->add_option("--level", o.level, "single level i");
  ax->add_option("--fault", o.fault,
                 "intransitive, degenerate, flat-segment, non-additive or jump");
  auto* rec = app.add_subcommand("recover", "recover (P, u) from the induced oracle");
  common(rec);
  rec->add_option("--out", o.out, "write the recovered scenario");
  auto* uq = app.add_subcommand("uniqueness", "relative uniqueness of two scenarios");
  common(uq);
  uq->add_option("--other", o.other, "second scenario file");
  auto* ex = app.add_subcommand("example", "worked examples");
  common(ex);
  ex->add_option("which", o.which, "villa, dpp or forward")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kInputError;
  }
  try {
    if (cce_cmd->parsed()) return cmd_cce(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
    if (semi->parsed()) return cmd_semigroup(o, out);
    if (ax->parsed()) return cmd_axioms(o, out);
    if (rec->parsed()) return cmd_recover(o, out);
    if (uq->parsed()) return cmd_uniqueness(o, out);
    if (ex->parsed()) return cmd_example(o, out);
  } catch (const ParseError& e) {
    err << "error: " << o.scenario << ": " << e.what() << "\n";
    return kInputError;
  } catch (const RecoveryError& e) {
    err << "recovery rejected: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  err << app.help();
  return kInputError;
}

}  // namespace itp
