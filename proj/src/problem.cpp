#include "fsdp/problem.hpp"

#include <algorithm>
#include <cmath>

#include "fsdp/errors.hpp"

namespace fsdp {

Box::Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in dimension");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
      throw InvalidArgument("box coordinate " + std::to_string(i) + " has lower > upper");
    }
  }
}

Box Box::point(ConstVec x) { return Box(Vec(x.begin(), x.end()), Vec(x.begin(), x.end())); }

Box Box::uniform(std::size_t dim, double lo, double hi) { return Box(Vec(dim, lo), Vec(dim, hi)); }

bool Box::contains(ConstVec x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

bool Box::bounded() const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) return false;
  }
  return true;
}

Vec Box::clamp(ConstVec x) const {
  Vec out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lower[i], upper[i]);
  return out;
}

Box Box::concat(const Box& other) const {
  Vec lo = lower, hi = upper;
  lo.insert(lo.end(), other.lower.begin(), other.lower.end());
  hi.insert(hi.end(), other.upper.begin(), other.upper.end());
  return Box(std::move(lo), std::move(hi));
}

const AdditiveCosts& ProblemSpec::costs() const {
  if (!is_additive()) throw InvalidArgument("problem objective is not additively separable");
  return std::get<AdditiveCosts>(objective);
}

const Representation& ProblemSpec::representation() const {
  if (is_additive()) throw InvalidArgument("problem objective is not a representation");
  return std::get<Representation>(objective);
}

void ProblemSpec::validate() const {
  if (t0 < 0) throw InvalidArgument("t0 must be nonnegative");
  if (T <= t0) throw InvalidArgument("terminal stage must exceed t0");
  if (n < 1 || m < 1) throw InvalidArgument("state and input dimensions must be at least 1");
  if (!dynamics) throw InvalidArgument("dynamics are not set");
  if (state_boxes.size() != static_cast<std::size_t>(T - t0 + 1)) {
    throw InvalidArgument("expected one state box per stage t0..T");
  }
  for (const Box& b : state_boxes) {
    if (b.dim() != n) throw InvalidArgument("state box dimension differs from n");
  }
  if (input_box.dim() != m) throw InvalidArgument("input box dimension differs from m");
  if (x0.size() != n) throw InvalidArgument("x0 dimension differs from n");
  if (is_additive()) {
    const auto& c = costs();
    if (c.stage_costs.size() != static_cast<std::size_t>(T - t0)) {
      throw InvalidArgument("expected one stage cost per stage t0..T-1");
    }
    if (!c.terminal_cost) throw InvalidArgument("terminal cost is not set");
  } else {
    const auto& r = representation();
    if (!(r.horizon == horizon())) throw HorizonMismatch("representation horizon differs from the problem");
  }
}

namespace {

double additive_tail(const AdditiveCosts& c, int t0, int s, const std::vector<Vec>& inputs,
                     const std::vector<Vec>& states) {
  double acc = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& cost = c.stage_costs[static_cast<std::size_t>(s - t0) + i];
    if (cost) acc += cost(states[i], inputs[i]);
  }
  return acc + c.terminal_cost(states[inputs.size()]);
}

}  // namespace

double evaluate_tail(const Objective& objective, int t0, int s, const std::vector<Vec>& inputs,
                     const std::vector<Vec>& states) {
  if (states.size() != inputs.size() + 1) throw InvalidArgument("trajectory needs one more state than inputs");
  if (const auto* c = std::get_if<AdditiveCosts>(&objective)) {
    if (static_cast<std::size_t>(s - t0) + inputs.size() != c->stage_costs.size()) {
      throw InvalidArgument("trajectory length does not match the tail horizon");
    }
    return additive_tail(*c, t0, s, inputs, states);
  }
  return std::get<Representation>(objective).evaluate_from(s, inputs, states);
}

double evaluate_tail(const ProblemSpec& spec, int s, const std::vector<Vec>& inputs, const std::vector<Vec>& states) {
  return evaluate_tail(spec.objective, spec.t0, s, inputs, states);
}

double evaluate_objective(const ProblemSpec& spec, const std::vector<Vec>& inputs, const std::vector<Vec>& states) {
  return evaluate_tail(spec, spec.t0, inputs, states);
}

bool is_feasible_input(const ProblemSpec& spec, ConstVec x, ConstVec u, int t) {
  if (!spec.input_box.contains(u)) return false;
  Vec next(spec.n);
  spec.dynamics(x, u, t, next);
  return spec.state_box(t + 1).contains(next);
}

namespace {

template <typename InputAt>
Trajectory rollout_impl(const ProblemSpec& spec, ConstVec x0, InputAt input_at) {
  if (!spec.state_box(spec.t0).contains(x0)) throw InfeasibleState(spec.t0, Vec(x0.begin(), x0.end()));
  Trajectory tr;
  tr.t0 = spec.t0;
  tr.states.emplace_back(x0.begin(), x0.end());
  for (int t = spec.t0; t < spec.T; ++t) {
    Vec u = input_at(tr.states.back(), t);
    if (!spec.input_box.contains(u)) throw InfeasibleInput(t, u);
    Vec next(spec.n);
    spec.dynamics(tr.states.back(), u, t, next);
    if (!spec.state_box(t + 1).contains(next)) throw InfeasibleState(t + 1, next);
    tr.inputs.push_back(std::move(u));
    tr.states.push_back(std::move(next));
  }
  tr.objective_value = evaluate_objective(spec, tr.inputs, tr.states);
  return tr;
}

}  // namespace

Trajectory rollout_deterministic(const ProblemSpec& spec, const FeedbackPolicy& policy, ConstVec x0) {
  return rollout_impl(spec, x0, [&](const Vec& x, int t) { return policy(x, t); });
}

Trajectory rollout_deterministic(const ProblemSpec& spec, const FeedbackPolicy& policy) {
  return rollout_deterministic(spec, policy, spec.x0);
}

Trajectory rollout_open_loop(const ProblemSpec& spec, const std::vector<Vec>& inputs, ConstVec x0) {
  if (inputs.size() != static_cast<std::size_t>(spec.T - spec.t0)) {
    throw InvalidArgument("open-loop sequence length differs from the horizon");
  }
  return rollout_impl(spec, x0, [&](const Vec&, int t) { return inputs[static_cast<std::size_t>(t - spec.t0)]; });
}

Trajectory rollout_open_loop(const ProblemSpec& spec, const std::vector<Vec>& inputs) {
  return rollout_open_loop(spec, inputs, spec.x0);
}

}  // namespace fsdp
