#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "itp/preference_engine.hpp"

namespace itp {

struct MeasureVariant {
  std::string name;
  ProbabilityMeasure measure;
};

struct NamedAct {
  std::string name;
  Act act;
};

/// Self-financing fraction strategies: at each decision time t < N and each
/// atom at t a fraction of wealth is held in the risky asset `price`.
struct StrategySpec {
  double wealth = 1.0;
  /// Act names of the risky price at every time.
  std::vector<std::string> price;
  std::vector<double> fractions;
  std::optional<MonotoneCurve> initial_utility;
};

struct ScenarioSpec {
  std::string name;
  /// Measure variant used when none is requested.
  std::string variant;
  std::string note;
  SpacePtr space;
  std::vector<MeasureVariant> measures;
  UtilityField field;
  std::vector<NamedAct> acts;
  std::optional<StrategySpec> strategies;

  /// Throws PreconditionError on an unknown variant; empty selects the default.
  const ProbabilityMeasure& measure(std::string_view variant = {}) const;
  const Act& act(std::string_view name) const;
  Representation representation(std::string_view variant = {}) const;
};

/// "identity", "linear(c)", "pl((x,y),...)", "exp(a)", "power(g)" followed by
/// optional " in(b)", " out(c)" and " jump(at,left,right)" modifiers.
/// Throws ParseError with a 1-based column on line 1.
MonotoneCurve parse_curve(std::string_view text);

/// Throws ParseError (line, column) on syntax errors and InvariantError on
/// structural ones.
ScenarioSpec parse_scenario(std::string_view text);
std::string format_scenario(const ScenarioSpec& spec);

ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

}  // namespace itp
