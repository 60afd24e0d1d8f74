#pragma once

#include <cstdint>
#include <optional>

#include "fsdp/grid.hpp"
#include "fsdp/problem.hpp"

namespace fsdp {

/// Additively separable problem with state grids over X_t and an input grid
/// over U. Successors are projected onto the nearest grid point.
struct DiscreteProblem {
  ProblemSpec spec;
  StageGrids grids;

  /// The projected problem as a ProblemSpec: f is replaced by its nearest
  /// grid point whenever f lands inside X_{t+1}.
  ProblemSpec as_spec() const;
};

/// k_state has one entry (all coordinates) or one per state coordinate;
/// likewise k_input.
DiscreteProblem discretize(const ProblemSpec& spec, const std::vector<std::size_t>& k_state,
                           const std::vector<std::size_t>& k_input);
DiscreteProblem discretize(const ProblemSpec& spec, std::size_t k_state, std::size_t k_input);
DiscreteProblem discretize(const ProblemSpec& spec, StageGrids grids);

/// Grids over the per-stage state boxes and the input box.
StageGrids make_stage_grids(const std::vector<Box>& state_boxes, int t0, const Box& input_box,
                            const std::vector<std::size_t>& k_state, const std::vector<std::size_t>& k_input);

enum class EmptySetPolicy {
  /// Throw EmptyFeasibleSet naming the stage and state.
  kThrow,
  /// Store +inf and mark the state as having no input.
  kPrune,
};

struct SolveOptions {
  /// Successor values by multilinear interpolation instead of nearest node.
  bool interpolate = false;
  unsigned threads = 1;
  EmptySetPolicy on_empty = EmptySetPolicy::kThrow;
};

/// Cost-to-go layers F(., t) for t0..T and argmin input indices for t < T.
/// An argmin of -1 marks a pruned state.
struct ValueTable {
  int t0 = 0;
  int T = 1;
  std::vector<TensorGrid> grids;
  TensorGrid inputs;
  std::vector<Vec> values;
  std::vector<std::vector<std::int32_t>> argmin;
  bool interpolated = false;

  const TensorGrid& grid(int t) const { return grids.at(static_cast<std::size_t>(t - t0)); }
  const Vec& layer(int t) const { return values.at(static_cast<std::size_t>(t - t0)); }
  /// Successor value as the solver sees it: interpolated or nearest node.
  double successor_value(int t, ConstVec x) const;
};

ValueTable solve_bellman(const DiscreteProblem& disc, const SolveOptions& opts = {});

/// Multilinear interpolation of F(., t); throws OutOfBox outside the grid.
double value_interpolate(const ValueTable& vt, ConstVec x, int t);

/// Per-stage input index per grid state. Index -1 marks a state with no
/// feasible input.
struct TabularPolicy {
  int t0 = 0;
  int T = 1;
  std::vector<TensorGrid> grids;
  TensorGrid inputs;
  std::vector<std::vector<std::int32_t>> index;

  const TensorGrid& grid(int t) const { return grids.at(static_cast<std::size_t>(t - t0)); }
  std::int32_t input_index(int t, std::size_t state) const;
  Vec input(int t, std::size_t state) const;
  /// Policy acting on grid states by nearest node lookup.
  FeedbackPolicy as_feedback() const;
};

TabularPolicy extract_policy(const ValueTable& vt);

enum class LiftMode {
  /// Nearest node lookup; an infeasible tabular input is replaced by the
  /// closest feasible input found on the segment towards it.
  kNearest,
  /// Minimize c_t + F(., t + 1) over the input grid at the actual state.
  kLookahead,
};

struct LiftOptions {
  LiftMode mode = LiftMode::kNearest;
  int bisection_steps = 60;
};

using FeasibilityTest = std::function<bool(ConstVec x, ConstVec u, int t)>;

/// Lifted policy for the continuous problem `original` (the augmented
/// problem when the objective was augmented). Lookahead mode needs `vt`.
/// The returned mapping keeps references to `tab`, `original` and `vt`,
/// which must outlive it.
FeedbackPolicy lift_policy(const TabularPolicy& tab, const ProblemSpec& original, const LiftOptions& opts = {},
                           const ValueTable* vt = nullptr);

/// Nearest-mode lift for an arbitrary feasibility rule.
FeedbackPolicy lift_nearest(const TabularPolicy& tab, FeasibilityTest feasible, int bisection_steps = 60);

struct PipelineOptions {
  std::vector<std::size_t> k_state{10};
  std::vector<std::size_t> k_input{10};
  SolveOptions solve;
  LiftOptions lift;
};

struct PipelineResult {
  DiscreteProblem disc;
  ValueTable table;
  TabularPolicy policy;
  double discrete_optimum = 0.0;
  Trajectory rollout;
  double solve_seconds = 0.0;
};

/// Discretize, solve, extract, lift and roll out from spec.x0.
PipelineResult solve_pipeline(const ProblemSpec& spec, const PipelineOptions& opts);

struct SweepRow {
  std::size_t k = 0;
  double objective = 0.0;
  double discrete_optimum = 0.0;
  std::optional<double> gap;
  double seconds = 0.0;
};

/// One pipeline per k (used for both state and input grids).
std::vector<SweepRow> convergence_sweep(const ProblemSpec& spec, const std::vector<std::size_t>& k_list,
                                        const PipelineOptions& base, std::optional<double> reference = {});

/// Runs fn(begin, end) over [0, count) split into contiguous chunks.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace fsdp
