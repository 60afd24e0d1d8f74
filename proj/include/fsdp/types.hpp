#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fsdp {

using Vec = std::vector<double>;
using ConstVec = std::span<const double>;
using MutVec = std::span<double>;

/// Deterministic dynamics x' = f(x, u, t), written into `next`.
using Dynamics = std::function<void(ConstVec x, ConstVec u, int t, MutVec next)>;

/// Stochastic dynamics x' = f(x, u, t, v), written into `next`.
using StochasticDynamics = std::function<void(ConstVec x, ConstVec u, int t, ConstVec v, MutVec next)>;

using StageCost = std::function<double(ConstVec x, ConstVec u)>;
using TerminalCost = std::function<double(ConstVec x)>;

/// State feedback policy pi(x, t) returning an input vector.
using FeedbackPolicy = std::function<Vec(ConstVec x, int t)>;

/// Per-coordinate closed intervals. Infinite bounds are allowed and mark
/// unbounded coordinates (stochastic disturbance states).
struct Box {
  Vec lower;
  Vec upper;

  Box() = default;
  Box(Vec lo, Vec hi);
  static Box point(ConstVec x);
  static Box uniform(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower.size(); }
  bool contains(ConstVec x) const;
  bool bounded() const;
  Vec clamp(ConstVec x) const;
  /// Cartesian product of this box and `other`.
  Box concat(const Box& other) const;
};

/// Costs of an additively separable objective. A null stage cost counts as
/// zero; stage_costs[i] belongs to stage t0 + i.
struct AdditiveCosts {
  std::vector<StageCost> stage_costs;
  TerminalCost terminal_cost;
};

struct Trajectory {
  int t0 = 0;
  std::vector<Vec> inputs;
  std::vector<Vec> states;
  double objective_value = 0.0;

  int horizon() const { return t0 + static_cast<int>(inputs.size()); }
};

}  // namespace fsdp
