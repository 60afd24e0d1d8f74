#pragma once

#include <variant>

#include "fsdp/representation.hpp"
#include "fsdp/types.hpp"

namespace fsdp {

using Objective = std::variant<AdditiveCosts, Representation>;

/// Finite horizon problem: minimize the objective over input sequences
/// subject to x(t+1) = f(x(t), u(t), t), x(t) in X_t, u(t) in U.
struct ProblemSpec {
  int t0 = 0;
  int T = 1;
  std::size_t n = 1;
  std::size_t m = 1;
  Dynamics dynamics;
  /// state_boxes[i] is X_{t0 + i}; there are T - t0 + 1 of them.
  std::vector<Box> state_boxes;
  Box input_box;
  Objective objective;
  Vec x0;

  Horizon horizon() const { return {t0, T, n, m}; }
  const Box& state_box(int t) const { return state_boxes.at(static_cast<std::size_t>(t - t0)); }
  bool is_additive() const { return std::holds_alternative<AdditiveCosts>(objective); }
  const AdditiveCosts& costs() const;
  const Representation& representation() const;

  /// Checks the structural invariants and throws InvalidArgument.
  void validate() const;
};

/// Objective of a complete trajectory of `spec` starting at stage t0.
double evaluate_objective(const ProblemSpec& spec, const std::vector<Vec>& inputs, const std::vector<Vec>& states);

/// Objective of the tail sub-problem starting at stage s.
double evaluate_tail(const ProblemSpec& spec, int s, const std::vector<Vec>& inputs, const std::vector<Vec>& states);
double evaluate_tail(const Objective& objective, int t0, int s, const std::vector<Vec>& inputs,
                     const std::vector<Vec>& states);

/// Feasibility of u at (x, t): u in U and f(x, u, t) in X_{t+1}.
bool is_feasible_input(const ProblemSpec& spec, ConstVec x, ConstVec u, int t);

Trajectory rollout_deterministic(const ProblemSpec& spec, const FeedbackPolicy& policy, ConstVec x0);
Trajectory rollout_deterministic(const ProblemSpec& spec, const FeedbackPolicy& policy);

/// Rollout of a fixed input sequence.
Trajectory rollout_open_loop(const ProblemSpec& spec, const std::vector<Vec>& inputs, ConstVec x0);
Trajectory rollout_open_loop(const ProblemSpec& spec, const std::vector<Vec>& inputs);

}  // namespace fsdp
