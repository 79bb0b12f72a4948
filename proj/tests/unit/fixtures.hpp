#pragma once

#include <memory>
#include <string>
#include <vector>

#include "itp/preference_engine.hpp"

namespace fixtures {

using namespace itp;

/// a, b, c with t1 = {a,b} | {c} and t2 singletons.
inline SpacePtr three_states() {
  return std::make_shared<const FilteredSpace>(FilteredSpace::from_ids(
      {"a", "b", "c"}, {0, 1, 2}, {{{"a", "b", "c"}}, {{"a", "b"}, {"c"}}, {{"a"}, {"b"}, {"c"}}}));
}

/// a, b, c with one period and singleton atoms at t1.
inline SpacePtr one_period() {
  return std::make_shared<const FilteredSpace>(
      FilteredSpace::from_ids({"a", "b", "c"}, {0, 1}, {{{"a", "b", "c"}}, {{"a"}, {"b"}, {"c"}}}));
}

inline Representation uniform_rep(const SpacePtr& space, const std::vector<double>& p,
                                  const MonotoneCurve& curve) {
  return Representation(space, ProbabilityMeasure(p), UtilityField::uniform(space, curve));
}

}  // namespace fixtures
