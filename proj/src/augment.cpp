#include "fsdp/augment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsdp/errors.hpp"
#include "fsdp/rng.hpp"
#include "fsdp/stochastic.hpp"

namespace fsdp {

const Representation& augmented_part(const Representation& r, bool separate_additive) {
  if (separate_additive && r.sum_lhs && r.sum_rhs) {
    if (r.sum_lhs->additive_source) return *r.sum_rhs;
    if (r.sum_rhs->additive_source) return *r.sum_lhs;
  }
  return r;
}

namespace {

/// Pieces shared by the deterministic and stochastic augmentations.
struct AugmentPlan {
  std::shared_ptr<const Representation> carried;
  std::shared_ptr<const AdditiveCosts> additive;
  std::size_t n = 0;
  std::size_t l = 0;
  std::vector<Box> z2_boxes;
};

AugmentPlan make_plan(const Representation& rep, std::size_t n, const std::vector<Box>& z2_bounds,
                      bool separate_additive) {
  AugmentPlan plan;
  const Representation& carried = augmented_part(rep, separate_additive);
  plan.carried = std::make_shared<const Representation>(carried);
  if (&carried != &rep) {
    plan.additive = (rep.sum_lhs->additive_source ? rep.sum_lhs : rep.sum_rhs)->additive_source;
  }
  plan.n = n;
  plan.l = carried.dimension();
  const Horizon& h = rep.horizon;
  if (z2_bounds.size() != h.stages() + 1) throw InvalidArgument("expected one z2 box per stage t0..T");
  for (std::size_t i = 0; i < z2_bounds.size(); ++i) {
    std::size_t live = i == 0 ? 0 : carried.dims[i - 1];
    const Box& b = z2_bounds[i];
    if (i > 0 && b.dim() < live) throw InvalidArgument("z2 box at stage " + std::to_string(h.t0 + static_cast<int>(i)) +
                                                       " is smaller than the carried dimension");
    Vec lo(plan.l, 0.0), hi(plan.l, 0.0);
    for (std::size_t j = 0; j < live; ++j) {
      lo[j] = b.lower[j];
      hi[j] = b.upper[j];
    }
    plan.z2_boxes.emplace_back(std::move(lo), std::move(hi));
  }
  return plan;
}

/// Writes z2(t + 1) = phi_t(z1, u, z2(t)) into out, padding with zeros.
/// Holds its own copies of the stage map and dims so the hot path touches
/// no shared state.
struct Carrier {
  StageMap stage;
  std::vector<std::size_t> dims;
  int t0 = 0;
  std::size_t n = 0;

  explicit Carrier(const AugmentPlan& plan)
      : stage(plan.carried->stage), dims(plan.carried->dims), t0(plan.carried->horizon.t0), n(plan.n) {}

  void operator()(int t, ConstVec z, ConstVec u, MutVec out) const {
    const auto s = static_cast<std::size_t>(t - t0);
    ConstVec w = s == 0 ? ConstVec() : z.subspan(n, dims[s - 1]);
    const std::size_t d = dims[s];
    stage(t, z.first(n), u, w, out.first(d));
    for (std::size_t i = d; i < out.size(); ++i) out[i] = 0.0;
  }
};

AdditiveCosts augmented_costs(const AugmentPlan& plan) {
  AdditiveCosts c;
  const Representation& r = *plan.carried;
  const std::size_t n = plan.n;
  auto carried = plan.carried;
  auto additive = plan.additive;
  c.stage_costs.resize(r.horizon.stages());
  if (additive) {
    for (std::size_t i = 0; i < c.stage_costs.size(); ++i) {
      const StageCost& base = additive->stage_costs[i];
      if (base) c.stage_costs[i] = [base, n](ConstVec z, ConstVec u) { return base(z.first(n), u); };
    }
  }
  c.terminal_cost = [carried, additive, n](ConstVec z) {
    double v = carried->terminal(z.first(n), z.subspan(n, carried->dims.back()));
    return additive ? additive->terminal_cost(z.first(n)) + v : v;
  };
  return c;
}

template <typename Spec>
void fill_common(const Spec& spec, const AugmentPlan& plan, Spec& out) {
  out.t0 = spec.t0;
  out.T = spec.T;
  out.n = spec.n + plan.l;
  out.m = spec.m;
  out.input_box = spec.input_box;
  out.state_boxes.clear();
  for (std::size_t i = 0; i < spec.state_boxes.size(); ++i) {
    out.state_boxes.push_back(spec.state_boxes[i].concat(plan.z2_boxes[i]));
  }
  out.objective = augmented_costs(plan);
  out.x0 = spec.x0;
  out.x0.resize(out.n, 0.0);
}

Vec random_input(const Box& U, CounterRng& rng) {
  Vec u(U.dim());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.uniform(U.lower[i], U.upper[i]);
  return u;
}

/// Rolls random input sequences through the augmented dynamics and checks
/// the carried coordinates against their boxes while the prefix stays
/// feasible for the original problem.
template <typename Step>
void validate_bounds(const AugmentPlan& plan, int t0, int T, const std::vector<Box>& x_boxes, const Box& U,
                     ConstVec z0, const AugmentOptions& opts, Step step) {
  const std::size_t total = opts.validation_samples;
  for (std::size_t sample = 0; sample < total; ++sample) {
    CounterRng rng(opts.seed, sample);
    Vec z(z0.begin(), z0.end()), next(z.size());
    for (int t = t0; t < T; ++t) {
      Vec u;
      if (sample == 0) {
        u = U.lower;
      } else if (sample == 1) {
        u = U.upper;
      } else {
        u = random_input(U, rng);
      }
      step(z, u, t, rng, next);
      const Box& xb = x_boxes[static_cast<std::size_t>(t + 1 - t0)];
      if (!xb.contains(ConstVec(next).first(plan.n))) break;
      const Box& zb = plan.z2_boxes[static_cast<std::size_t>(t + 1 - t0)];
      for (std::size_t j = 0; j < plan.l; ++j) {
        double v = next[plan.n + j];
        if (!(v >= zb.lower[j] && v <= zb.upper[j])) throw BoundsTooTight(t + 1, j, v);
      }
      z.swap(next);
    }
  }
}

}  // namespace

AugmentedSpec augment(const ProblemSpec& spec, const std::vector<Box>& z2_bounds, const AugmentOptions& opts) {
  spec.validate();
  const Representation& rep = spec.representation();
  AugmentPlan plan = make_plan(rep, spec.n, z2_bounds, opts.separate_additive);

  AugmentedSpec out;
  fill_common(spec, plan, out.spec);
  auto base = spec.dynamics;
  const std::size_t n = spec.n;
  out.spec.dynamics = [base, carry = Carrier(plan), n](ConstVec z, ConstVec u, int t, MutVec next) {
    base(z.first(n), u, t, next.first(n));
    carry(t, z, u, next.subspan(n));
  };
  out.z2_bounds = plan.z2_boxes;
  out.base_dim = n;
  out.representation_dim = plan.l;
  out.separated = static_cast<bool>(plan.additive);

  validate_bounds(plan, spec.t0, spec.T, spec.state_boxes, spec.input_box, out.spec.x0, opts,
                  [&](ConstVec z, ConstVec u, int t, CounterRng&, MutVec next) { out.spec.dynamics(z, u, t, next); });
  return out;
}

StochasticSpec augment_stochastic(const StochasticSpec& spec, const std::vector<Box>& z2_bounds,
                                  const AugmentOptions& opts) {
  spec.validate();
  const Representation& rep = spec.representation();
  AugmentPlan plan = make_plan(rep, spec.n, z2_bounds, opts.separate_additive);

  StochasticSpec out;
  fill_common(spec, plan, out);
  out.q = spec.q;
  out.linear_block = spec.linear_block;
  auto base = spec.dynamics;
  const std::size_t n = spec.n;
  out.dynamics = [base, carry = Carrier(plan), n](ConstVec z, ConstVec u, int t, ConstVec v, MutVec next) {
    base(z.first(n), u, t, v, next.first(n));
    carry(t, z, u, next.subspan(n));
  };

  const std::size_t q = spec.q;
  validate_bounds(plan, spec.t0, spec.T, spec.state_boxes, spec.input_box, out.x0, opts,
                  [&](ConstVec z, ConstVec u, int t, CounterRng& rng, MutVec next) {
                    Vec v(q);
                    standard_normal_sampler(rng, v);
                    out.dynamics(z, u, t, v, next);
                  });
  return out;
}

std::vector<Box> estimate_z2_bounds(const ProblemSpec& spec, const BoundEstimateOptions& opts) {
  spec.validate();
  const Representation& rep = spec.representation();
  const Horizon& h = rep.horizon;
  std::vector<Box> out;
  out.push_back(Box());
  CounterRng rng(opts.seed, 0);
  for (int t = h.t0; t < h.T; ++t) {
    const Box& X = spec.state_box(t);
    if (!X.bounded() || !spec.input_box.bounded()) {
      throw InvalidArgument("bound estimation needs bounded state and input boxes");
    }
    const Box& W = out.back();
    Box probe = X.concat(spec.input_box).concat(W);
    const std::size_t dims = probe.dim();
    std::vector<std::size_t> counts(dims);
    double total = 1.0;
    for (std::size_t i = 0; i < dims; ++i) {
      counts[i] = probe.lower[i] == probe.upper[i] ? 1 : opts.probe_points;
      total *= static_cast<double>(counts[i]);
    }
    const std::size_t d = rep.dim_at(t);
    Vec lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
    Vec point(dims), value(d);
    auto visit = [&] {
      ConstVec p(point);
      ConstVec w = t == h.t0 ? ConstVec() : p.subspan(spec.n + spec.m);
      rep.stage(t, p.first(spec.n), p.subspan(spec.n, spec.m), w, value);
      for (std::size_t j = 0; j < d; ++j) {
        lo[j] = std::min(lo[j], value[j]);
        hi[j] = std::max(hi[j], value[j]);
      }
    };
    if (total <= static_cast<double>(opts.max_probes)) {
      std::vector<std::size_t> idx(dims, 0);
      while (true) {
        for (std::size_t i = 0; i < dims; ++i) {
          double frac = counts[i] == 1 ? 0.0 : static_cast<double>(idx[i]) / static_cast<double>(counts[i] - 1);
          point[i] = probe.lower[i] + frac * (probe.upper[i] - probe.lower[i]);
        }
        visit();
        std::size_t i = dims;
        while (i > 0 && ++idx[i - 1] == counts[i - 1]) idx[--i] = 0;
        if (i == 0) break;
      }
    } else {
      for (std::size_t s = 0; s < opts.max_probes; ++s) {
        for (std::size_t i = 0; i < dims; ++i) point[i] = rng.uniform(probe.lower[i], probe.upper[i]);
        visit();
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      double pad = opts.margin * std::max(std::abs(hi[j] - lo[j]), 1e-12);
      lo[j] -= pad;
      hi[j] += pad;
    }
    out.emplace_back(std::move(lo), std::move(hi));
  }
  return out;
}

}  // namespace fsdp
