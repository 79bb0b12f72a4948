#include "itp/random_models.hpp"

#include <algorithm>
#include <memory>
#include <string>

namespace itp {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct Node {
  std::vector<std::size_t> children;
  double weight = 1.0;  // conditional on the parent
  std::vector<std::size_t> states;
};

}  // namespace

MonotoneCurve random_piecewise_linear(std::mt19937_64& rng) {
  std::vector<double> xs{-4.0, 0.0, 4.0};
  for (double x : {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0}) {
    if (uniform(rng, 0.0, 1.0) < 0.4) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  const auto zero = static_cast<std::size_t>(std::find(xs.begin(), xs.end(), 0.0) - xs.begin());
  std::vector<std::pair<double, double>> pts(xs.size());
  pts[zero] = {0.0, 0.0};
  for (std::size_t k = zero + 1; k < xs.size(); ++k) {
    pts[k] = {xs[k], pts[k - 1].second + uniform(rng, 0.25, 2.0) * (xs[k] - xs[k - 1])};
  }
  for (std::size_t k = zero; k-- > 0;) {
    pts[k] = {xs[k], pts[k + 1].second - uniform(rng, 0.25, 2.0) * (xs[k + 1] - xs[k])};
  }
  return MonotoneCurve::piecewise_linear(std::move(pts));
}

MonotoneCurve random_curve(std::mt19937_64& rng, bool allow_exponential) {
  switch (pick(rng, 0, allow_exponential ? 4 : 3)) {
    case 0:
      return MonotoneCurve::identity();
    case 1:
      return MonotoneCurve::linear(uniform(rng, 0.5, 2.0));
    case 2:
      return random_piecewise_linear(rng);
    case 3:
      return MonotoneCurve::power(uniform(rng, 0.5, 1.5));
    default:
      return MonotoneCurve::exponential(uniform(rng, 0.5, 1.5));
  }
}

Representation random_representation(std::mt19937_64& rng, const RandomModelOptions& options) {
  const std::size_t periods = pick(rng, options.min_periods, options.max_periods);
  std::vector<std::vector<Node>> levels(periods + 1);
  levels[0].push_back(Node{});
  std::size_t frontier = 1;
  for (std::size_t t = 1; t <= periods; ++t) {
    auto& prev = levels[t - 1];
    for (std::size_t n = 0; n < prev.size(); ++n) {
      // each node keeps at least one child; cap the total by max_states
      const std::size_t others = prev.size() - n - 1;
      const std::size_t room = options.max_states - (levels[t].size() + others);
      std::size_t lo = 1;
      if (t == 1) lo = std::min<std::size_t>(std::max<std::size_t>(1, options.min_first_atoms), 3);
      std::size_t count = pick(rng, lo, 3);
      count = std::max<std::size_t>(1, std::min(count, room));
      double total = 0.0;
      std::vector<double> w(count);
      for (auto& x : w) {
        x = uniform(rng, 1.0, 3.0);
        total += x;
      }
      for (std::size_t c = 0; c < count; ++c) {
        Node child;
        child.weight = w[c] / total;
        if (t == periods && c > 0 && uniform(rng, 0.0, 1.0) < options.null_chance) {
          child.weight = 0.0;
        }
        prev[n].children.push_back(levels[t].size());
        levels[t].push_back(child);
      }
    }
    frontier = levels[t].size();
  }
  // renormalize final siblings after zeroing
  for (auto& node : levels[periods - 1]) {
    double total = 0.0;
    for (auto c : node.children) total += levels[periods][c].weight;
    for (auto c : node.children) levels[periods][c].weight /= total;
  }
  std::vector<std::string> ids;
  std::vector<double> weights;
  std::size_t spare = options.max_states - frontier;
  std::vector<std::vector<double>> prob(periods + 1);
  prob[0] = {1.0};
  for (std::size_t t = 1; t <= periods; ++t) {
    prob[t].assign(levels[t].size(), 0.0);
    for (std::size_t n = 0; n < levels[t - 1].size(); ++n) {
      for (auto c : levels[t - 1][n].children) {
        prob[t][c] = prob[t - 1][n] * levels[t][c].weight;
      }
    }
  }
  for (std::size_t n = 0; n < levels[periods].size(); ++n) {
    std::size_t count = 1;
    if (spare > 0 && uniform(rng, 0.0, 1.0) < options.pair_chance) {
      count = 2;
      --spare;
    }
    std::vector<double> w(count);
    double total = 0.0;
    for (auto& x : w) {
      x = uniform(rng, 1.0, 3.0);
      total += x;
    }
    for (std::size_t c = 0; c < count; ++c) {
      levels[periods][n].states.push_back(ids.size());
      ids.push_back("w" + std::to_string(ids.size()));
      weights.push_back(prob[periods][n] * w[c] / total);
    }
  }
  for (std::size_t t = periods; t-- > 0;) {
    for (auto& node : levels[t]) {
      for (auto c : node.children) {
        const auto& st = levels[t + 1][c].states;
        node.states.insert(node.states.end(), st.begin(), st.end());
      }
    }
  }
  std::vector<std::vector<std::vector<std::size_t>>> partitions(periods + 1);
  for (std::size_t t = 0; t <= periods; ++t) {
    for (const auto& node : levels[t]) partitions[t].push_back(node.states);
  }
  std::vector<double> times(periods + 1);
  for (std::size_t t = 0; t <= periods; ++t) times[t] = static_cast<double>(t);
  auto space = std::make_shared<const FilteredSpace>(ids, times, partitions);

  std::vector<std::vector<MonotoneCurve>> curves(periods + 1);
  for (std::size_t t = 0; t <= periods; ++t) {
    for (std::size_t k = 0; k < space->num_atoms(t); ++k) {
      curves[t].push_back(options.piecewise_linear_only
                              ? random_piecewise_linear(rng)
                              : random_curve(rng, t == periods && t > 0));
    }
  }
  double total = 0.0;
  for (double x : weights) total += x;
  for (auto& x : weights) x /= total;
  return Representation(space, ProbabilityMeasure(std::move(weights)),
                        UtilityField(space, std::move(curves)));
}

Act random_act(const FilteredSpace& space, std::size_t t, std::mt19937_64& rng, double scale) {
  std::vector<double> v(space.num_atoms(t));
  for (auto& x : v) x = uniform(rng, -scale, scale);
  return Act::from_atoms(space, t, v);
}

ProbabilityMeasure random_equivalent(const ProbabilityMeasure& p, std::mt19937_64& rng) {
  std::vector<double> w(p.size());
  double total = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    w[s] = p.weight(s) * uniform(rng, 0.5, 2.0);
    total += w[s];
  }
  for (auto& x : w) x /= total;
  return ProbabilityMeasure(std::move(w));
}

}  // namespace itp
