#pragma once

#include <cstddef>
#include <random>

#include "itp/preference_engine.hpp"

namespace itp {

struct RandomModelOptions {
  std::size_t max_states = 16;
  std::size_t min_periods = 3;
  std::size_t max_periods = 4;
  /// Lower bound on the atoms at t_1 (recovery needs three).
  std::size_t min_first_atoms = 1;
  bool piecewise_linear_only = false;
  /// Chance that a final atom other than the first sibling gets mass 0.
  double null_chance = 0.0;
  /// Chance that a final atom holds two states.
  double pair_chance = 0.2;
};

/// Random tree with 1-3 children per node, conditional weights drawn from
/// [1, 3] and normalized, and a random curve per (time, atom). Exponential
/// curves appear only at the final time; u0 is never exponential.
Representation random_representation(std::mt19937_64& rng,
                                     const RandomModelOptions& options = {});

/// Piecewise-linear with breakpoints at -4, 4 and a subset of the half-integers
/// in between, slopes drawn from [0.25, 2].
MonotoneCurve random_piecewise_linear(std::mt19937_64& rng);

/// One of identity, linear, piecewise-linear, power (and exponential when
/// allowed).
MonotoneCurve random_curve(std::mt19937_64& rng, bool allow_exponential);

/// Atom values drawn uniformly from [-scale, scale].
Act random_act(const FilteredSpace& space, std::size_t t, std::mt19937_64& rng,
               double scale = 2.0);

/// Equivalent measure with state weights multiplied by factors from [0.5, 2].
ProbabilityMeasure random_equivalent(const ProbabilityMeasure& p, std::mt19937_64& rng);

}  // namespace itp
