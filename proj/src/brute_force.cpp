#include "fsdp/brute_force.hpp"

#include <cmath>
#include <limits>

#include "fsdp/errors.hpp"

namespace fsdp {

StageGrids input_only_grids(const ProblemSpec& spec, const TensorGrid& inputs) {
  StageGrids g;
  g.t0 = spec.t0;
  g.inputs = inputs;
  return g;
}

namespace {

/// Depth-first enumeration of input index sequences for the tail starting at
/// stage s. Partial objectives are carried forward in the same order the
/// objective evaluation uses, so leaf values match evaluate_tail exactly.
class Enumerator {
 public:
  Enumerator(const ProblemSpec& spec, const StageGrids& grids, int s, ConstVec x, const BruteForceOptions& opts)
      : spec_(spec), grids_(grids), s_(s), depth_(static_cast<std::size_t>(spec.T - s)) {
    if (s < spec.t0 || s >= spec.T) throw InvalidArgument("sub-problem stage outside the horizon");
    if (grids.inputs.dim() != spec.m) throw InvalidArgument("input grid dimension differs from m");
    double count = std::pow(static_cast<double>(grids.inputs.size()), static_cast<double>(depth_));
    if (count > opts.max_sequences) throw EnumerationTooLarge(count, opts.max_sequences);
    states_.assign(depth_ + 1, Vec(spec.n));
    inputs_.assign(depth_, Vec(spec.m));
    indices_.assign(depth_, 0);
    acc_.assign(depth_ + 1, 0.0);
    w_.assign(depth_ + 1, Vec());
    states_[0].assign(x.begin(), x.end());
    additive_ = spec.is_additive();
  }

  template <typename Leaf>
  void run(Leaf&& leaf) {
    recurse(0, leaf);
  }

  const std::vector<std::size_t>& indices() const { return indices_; }

  Trajectory trajectory(double value) const {
    Trajectory tr;
    tr.t0 = s_;
    tr.inputs = inputs_;
    tr.states = states_;
    tr.objective_value = value;
    return tr;
  }

  /// Replays an index sequence and returns the trajectory.
  Trajectory replay(const std::vector<std::size_t>& seq) {
    for (std::size_t d = 0; d < depth_; ++d) {
      indices_[d] = seq[d];
      if (!step(d)) throw InvalidArgument("replayed sequence is infeasible");
    }
    return trajectory(leaf_value());
  }

 private:
  bool step(std::size_t d) {
    int t = s_ + static_cast<int>(d);
    grids_.inputs.point(indices_[d], inputs_[d]);
    if (!spec_.input_box.contains(inputs_[d])) return false;
    Vec& next = states_[d + 1];
    spec_.dynamics(states_[d], inputs_[d], t, next);
    if (!spec_.state_box(t + 1).contains(next)) return false;
    if (grids_.projects()) {
      const TensorGrid& g = grids_.at(t + 1);
      g.point(g.nearest(next), next);
    }
    if (additive_) {
      const auto& c = spec_.costs().stage_costs[static_cast<std::size_t>(t - spec_.t0)];
      acc_[d + 1] = c ? acc_[d] + c(states_[d], inputs_[d]) : acc_[d];
    } else {
      const Representation& r = spec_.representation();
      w_[d + 1].assign(r.dim_at(t), 0.0);
      r.stage(t, states_[d], inputs_[d], w_[d], w_[d + 1]);
    }
    return true;
  }

  double leaf_value() const {
    if (additive_) return acc_[depth_] + spec_.costs().terminal_cost(states_[depth_]);
    return spec_.representation().terminal(states_[depth_], w_[depth_]);
  }

  template <typename Leaf>
  void recurse(std::size_t d, Leaf& leaf) {
    if (d == depth_) {
      leaf(leaf_value());
      return;
    }
    for (std::size_t j = 0; j < grids_.inputs.size(); ++j) {
      indices_[d] = j;
      if (step(d)) recurse(d + 1, leaf);
    }
  }

  const ProblemSpec& spec_;
  const StageGrids& grids_;
  int s_;
  std::size_t depth_;
  bool additive_ = true;
  std::vector<Vec> states_;
  std::vector<Vec> inputs_;
  std::vector<std::size_t> indices_;
  Vec acc_;
  std::vector<Vec> w_;
};

}  // namespace

BruteForceResult brute_force_solve_from(const ProblemSpec& spec, const StageGrids& grids, int s, ConstVec x,
                                        const BruteForceOptions& opts) {
  Enumerator e(spec, grids, s, x, opts);
  BruteForceResult res;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  e.run([&](double value) {
    ++res.feasible_sequences;
    if (!found || value < best) {
      found = true;
      best = value;
      res.input_indices = e.indices();
    }
  });
  if (!found) {
    throw NoFeasibleSequence("no feasible input sequence from stage " + std::to_string(s) + " at " +
                             format_vector(Vec(x.begin(), x.end())));
  }
  res.optimal_value = best;
  res.best = e.replay(res.input_indices);
  return res;
}

BruteForceResult brute_force_solve(const ProblemSpec& spec, const StageGrids& grids, const BruteForceOptions& opts) {
  return brute_force_solve_from(spec, grids, spec.t0, spec.x0, opts);
}

void enumerate_feasible(const ProblemSpec& spec, const StageGrids& grids, const SequenceVisitor& visit,
                        const BruteForceOptions& opts) {
  Enumerator e(spec, grids, spec.t0, spec.x0, opts);
  e.run([&](double value) { visit(e.indices(), e.trajectory(value)); });
}

PrincipleReport verify_principle_violation(const ProblemSpec& spec, const StageGrids& grids,
                                           const BruteForceOptions& opts) {
  PrincipleReport report;
  report.optimum = brute_force_solve(spec, grids, opts);
  const Trajectory& best = report.optimum.best;
  for (int s = spec.t0 + 1; s < spec.T; ++s) {
    auto offset = static_cast<std::ptrdiff_t>(s - spec.t0);
    std::vector<Vec> tail_inputs(best.inputs.begin() + offset, best.inputs.end());
    std::vector<Vec> tail_states(best.states.begin() + offset, best.states.end());
    double tail_value = evaluate_tail(spec, s, tail_inputs, tail_states);
    BruteForceResult sub = brute_force_solve_from(spec, grids, s, tail_states.front(), opts);
    double tol = 1e-12 * std::max(1.0, std::abs(sub.optimal_value));
    if (tail_value > sub.optimal_value + tol) {
      PrincipleViolation v;
      v.stage = s;
      v.state = tail_states.front();
      v.tail_value = tail_value;
      v.sub_optimum = sub.optimal_value;
      v.tail_inputs = std::move(tail_inputs);
      v.sub_inputs = sub.best.inputs;
      report.violations.push_back(std::move(v));
    }
  }
  return report;
}

}  // namespace fsdp
