#include "fsdp/bellman.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "fsdp/errors.hpp"

namespace fsdp {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (threads <= 1 || count < 2) {
    fn(0, count);
    return;
  }
  std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = count * w / workers;
    std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

StageGrids make_stage_grids(const std::vector<Box>& state_boxes, int t0, const Box& input_box,
                            const std::vector<std::size_t>& k_state, const std::vector<std::size_t>& k_input) {
  StageGrids g;
  g.t0 = t0;
  for (const Box& b : state_boxes) {
    if (!b.bounded()) throw InvalidArgument("state boxes must be bounded to build a grid");
    g.states.emplace_back(b, k_state);
  }
  if (!input_box.bounded()) throw InvalidArgument("input box must be bounded to build a grid");
  g.inputs = TensorGrid(input_box, k_input);
  return g;
}

DiscreteProblem discretize(const ProblemSpec& spec, StageGrids grids) {
  spec.validate();
  if (!spec.is_additive()) throw InvalidArgument("discretize needs an additively separable problem; augment it first");
  if (grids.states.size() != spec.state_boxes.size()) throw InvalidArgument("expected one state grid per stage");
  return DiscreteProblem{spec, std::move(grids)};
}

DiscreteProblem discretize(const ProblemSpec& spec, const std::vector<std::size_t>& k_state,
                           const std::vector<std::size_t>& k_input) {
  return discretize(spec, make_stage_grids(spec.state_boxes, spec.t0, spec.input_box, k_state, k_input));
}

DiscreteProblem discretize(const ProblemSpec& spec, std::size_t k_state, std::size_t k_input) {
  return discretize(spec, std::vector<std::size_t>{k_state}, std::vector<std::size_t>{k_input});
}

ProblemSpec DiscreteProblem::as_spec() const {
  ProblemSpec out = spec;
  auto base = spec.dynamics;
  auto boxes = spec.state_boxes;
  auto g = grids;
  out.dynamics = [base, boxes, g](ConstVec x, ConstVec u, int t, MutVec next) {
    base(x, u, t, next);
    if (boxes[static_cast<std::size_t>(t + 1 - g.t0)].contains(next)) {
      const TensorGrid& grid = g.at(t + 1);
      grid.point(grid.nearest(next), next);
    }
  };
  return out;
}

double ValueTable::successor_value(int t, ConstVec x) const {
  const TensorGrid& g = grid(t);
  const Vec& v = layer(t);
  return interpolated ? g.interpolate(v, x) : v[g.nearest(x)];
}

double value_interpolate(const ValueTable& vt, ConstVec x, int t) {
  if (t < vt.t0 || t > vt.T) throw OutOfBox("stage outside the value table");
  const TensorGrid& g = vt.grid(t);
  if (!g.box().contains(x)) throw OutOfBox("query " + format_vector(Vec(x.begin(), x.end())) + " outside the grid");
  return g.interpolate(vt.layer(t), x);
}

ValueTable solve_bellman(const DiscreteProblem& disc, const SolveOptions& opts) {
  const ProblemSpec& spec = disc.spec;
  const AdditiveCosts& costs = spec.costs();
  ValueTable vt;
  vt.t0 = spec.t0;
  vt.T = spec.T;
  vt.grids = disc.grids.states;
  vt.inputs = disc.grids.inputs;
  vt.interpolated = opts.interpolate;
  const std::size_t stages = static_cast<std::size_t>(spec.T - spec.t0);
  vt.values.resize(stages + 1);
  vt.argmin.resize(stages);

  std::vector<Vec> inputs(vt.inputs.size());
  for (std::size_t j = 0; j < inputs.size(); ++j) inputs[j] = vt.inputs.point(j);

  {
    const TensorGrid& g = vt.grid(spec.T);
    Vec& layer = vt.values[stages];
    layer.resize(g.size());
    Vec x(spec.n);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, x);
      layer[i] = costs.terminal_cost(x);
    }
  }

  for (int t = spec.T - 1; t >= spec.t0; --t) {
    const auto s = static_cast<std::size_t>(t - spec.t0);
    const TensorGrid& g = vt.grids[s];
    const TensorGrid& gn = vt.grids[s + 1];
    const Vec& next_values = vt.values[s + 1];
    const Box& next_box = spec.state_box(t + 1);
    const StageCost& cost = costs.stage_costs[s];
    Vec& layer = vt.values[s];
    auto& arg = vt.argmin[s];
    layer.assign(g.size(), 0.0);
    arg.assign(g.size(), -1);
    parallel_for(g.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
      Vec x(spec.n), y(spec.n);
      for (std::size_t i = begin; i < end; ++i) {
        g.point(i, x);
        double best = std::numeric_limits<double>::infinity();
        std::int32_t best_j = -1;
        bool any_feasible = false;
        for (std::size_t j = 0; j < inputs.size(); ++j) {
          spec.dynamics(x, inputs[j], t, y);
          if (!next_box.contains(y)) continue;
          any_feasible = true;
          double succ = opts.interpolate ? gn.interpolate(next_values, y) : next_values[gn.nearest(y)];
          double total = cost ? cost(x, inputs[j]) + succ : succ;
          if (total < best) {
            best = total;
            best_j = static_cast<std::int32_t>(j);
          }
        }
        if (!any_feasible && opts.on_empty == EmptySetPolicy::kThrow) throw EmptyFeasibleSet(t, x);
        layer[i] = best;
        arg[i] = best_j;
      }
    });
  }
  return vt;
}

std::int32_t TabularPolicy::input_index(int t, std::size_t state) const {
  return index.at(static_cast<std::size_t>(t - t0)).at(state);
}

Vec TabularPolicy::input(int t, std::size_t state) const {
  std::int32_t j = input_index(t, state);
  if (j < 0) throw EmptyFeasibleSet(t, grid(t).point(state));
  return inputs.point(static_cast<std::size_t>(j));
}

FeedbackPolicy TabularPolicy::as_feedback() const {
  auto self = std::make_shared<const TabularPolicy>(*this);
  return [self](ConstVec x, int t) { return self->input(t, self->grid(t).nearest(x)); };
}

TabularPolicy extract_policy(const ValueTable& vt) {
  TabularPolicy p;
  p.t0 = vt.t0;
  p.T = vt.T;
  p.grids = vt.grids;
  p.inputs = vt.inputs;
  p.index = vt.argmin;
  return p;
}

namespace {

double squared_distance(ConstVec a, ConstVec b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

/// Feasible input closest to `target` among the grid inputs, then refined by
/// bisection on the segment towards `target`.
Vec nearest_feasible(const TabularPolicy& tab, const FeasibilityTest& feasible, ConstVec x, ConstVec target, int t,
                     int steps) {
  double best = std::numeric_limits<double>::infinity();
  Vec anchor;
  Vec u(tab.inputs.dim());
  for (std::size_t j = 0; j < tab.inputs.size(); ++j) {
    tab.inputs.point(j, u);
    double d = squared_distance(u, target);
    if (d < best && feasible(x, u, t)) {
      best = d;
      anchor = u;
    }
  }
  if (anchor.empty()) throw EmptyFeasibleSet(t, Vec(x.begin(), x.end()));
  Vec lo = anchor, hi(target.begin(), target.end()), mid(lo.size());
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (lo[i] + hi[i]);
    if (feasible(x, mid, t)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

FeedbackPolicy lift_nearest(const TabularPolicy& tab, FeasibilityTest feasible, int bisection_steps) {
  return [&tab, feasible, bisection_steps](ConstVec x, int t) -> Vec {
    std::size_t idx = tab.grid(t).nearest(x);
    std::int32_t j = tab.input_index(t, idx);
    if (j < 0) {
      // The grid state had no feasible input; fall back to the first
      // feasible grid input at the actual state.
      Vec u(tab.inputs.dim());
      for (std::size_t k = 0; k < tab.inputs.size(); ++k) {
        tab.inputs.point(k, u);
        if (feasible(x, u, t)) return u;
      }
      throw EmptyFeasibleSet(t, Vec(x.begin(), x.end()));
    }
    Vec u = tab.inputs.point(static_cast<std::size_t>(j));
    if (feasible(x, u, t)) return u;
    return nearest_feasible(tab, feasible, x, u, t, bisection_steps);
  };
}

FeedbackPolicy lift_policy(const TabularPolicy& tab, const ProblemSpec& original, const LiftOptions& opts,
                           const ValueTable* vt) {
  FeasibilityTest feasible = [&original](ConstVec x, ConstVec u, int t) {
    return is_feasible_input(original, x, u, t);
  };
  FeedbackPolicy nearest = lift_nearest(tab, feasible, opts.bisection_steps);
  if (opts.mode == LiftMode::kNearest) return nearest;
  if (vt == nullptr) throw InvalidArgument("lookahead lift needs the value table");
  const AdditiveCosts& costs = original.costs();
  return [&tab, &original, &costs, vt, nearest](ConstVec x, int t) -> Vec {
    const StageCost& cost = costs.stage_costs[static_cast<std::size_t>(t - original.t0)];
    Vec u(tab.inputs.dim()), y(original.n), best_u;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < tab.inputs.size(); ++j) {
      tab.inputs.point(j, u);
      if (!original.input_box.contains(u)) continue;
      original.dynamics(x, u, t, y);
      if (!original.state_box(t + 1).contains(y)) continue;
      double succ = vt->successor_value(t + 1, y);
      double total = cost ? cost(x, u) + succ : succ;
      if (total < best) {
        best = total;
        best_u = u;
      }
    }
    if (best_u.empty()) return nearest(x, t);
    return best_u;
  };
}

PipelineResult solve_pipeline(const ProblemSpec& spec, const PipelineOptions& opts) {
  PipelineResult r{discretize(spec, opts.k_state, opts.k_input), {}, {}, 0.0, {}, 0.0};
  auto start = std::chrono::steady_clock::now();
  r.table = solve_bellman(r.disc, opts.solve);
  r.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.policy = extract_policy(r.table);
  r.discrete_optimum = r.table.layer(spec.t0)[r.table.grid(spec.t0).nearest(spec.x0)];
  FeedbackPolicy lifted = lift_policy(r.policy, spec, opts.lift, &r.table);
  r.rollout = rollout_deterministic(spec, lifted, spec.x0);
  return r;
}

std::vector<SweepRow> convergence_sweep(const ProblemSpec& spec, const std::vector<std::size_t>& k_list,
                                        const PipelineOptions& base, std::optional<double> reference) {
  std::vector<SweepRow> rows;
  for (std::size_t k : k_list) {
    PipelineOptions opts = base;
    opts.k_state = {k};
    opts.k_input = {k};
    auto start = std::chrono::steady_clock::now();
    PipelineResult r = solve_pipeline(spec, opts);
    SweepRow row;
    row.k = k;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.objective = r.rollout.objective_value;
    row.discrete_optimum = r.discrete_optimum;
    if (reference) row.gap = std::abs(row.objective - *reference);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fsdp
