#include "fsdp/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fsdp/errors.hpp"

namespace fsdp {

const AdditiveCosts& StochasticSpec::costs() const {
  if (!is_additive()) throw InvalidArgument("problem objective is not additively separable");
  return std::get<AdditiveCosts>(objective);
}

const Representation& StochasticSpec::representation() const {
  if (is_additive()) throw InvalidArgument("problem objective is not a representation");
  return std::get<Representation>(objective);
}

void StochasticSpec::validate() const {
  if (t0 < 0) throw InvalidArgument("t0 must be nonnegative");
  if (T <= t0) throw InvalidArgument("terminal stage must exceed t0");
  if (n < 1 || m < 1 || q < 1) throw InvalidArgument("state, input and disturbance dimensions must be at least 1");
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
    if (costs().stage_costs.size() != static_cast<std::size_t>(T - t0)) {
      throw InvalidArgument("expected one stage cost per stage t0..T-1");
    }
    if (!costs().terminal_cost) throw InvalidArgument("terminal cost is not set");
  } else if (!(representation().horizon == horizon())) {
    throw HorizonMismatch("representation horizon differs from the problem");
  }
  if (linear_block) {
    const auto& b = *linear_block;
    std::size_t p = b.coords.size();
    if (b.A.rows() != static_cast<Eigen::Index>(p) || b.A.cols() != static_cast<Eigen::Index>(p) ||
        b.B.rows() != static_cast<Eigen::Index>(p) || b.B.cols() != static_cast<Eigen::Index>(q)) {
      throw InvalidArgument("linear block matrices do not match its coordinates and q");
    }
    for (std::size_t c : b.coords) {
      if (c >= n) throw InvalidArgument("linear block coordinate out of range");
    }
  }
}

void standard_normal_sampler(CounterRng& rng, MutVec v) {
  for (double& x : v) x = rng.normal();
}

Trajectory trajectory_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0,
                          const std::vector<Vec>& disturbances, int start) {
  if (start < spec.t0 || start >= spec.T) throw InvalidArgument("start stage outside the horizon");
  if (disturbances.size() < static_cast<std::size_t>(spec.T - start)) {
    throw InvalidArgument("disturbance sequence shorter than the horizon");
  }
  if (!spec.state_box(start).contains(x0)) throw InfeasibleState(start, Vec(x0.begin(), x0.end()));
  Trajectory tr;
  tr.t0 = start;
  tr.states.emplace_back(x0.begin(), x0.end());
  for (int t = start; t < spec.T; ++t) {
    Vec u = policy(tr.states.back(), t);
    if (!spec.input_box.contains(u)) throw InfeasibleInput(t, u);
    Vec next(spec.n);
    spec.dynamics(tr.states.back(), u, t, disturbances[static_cast<std::size_t>(t - start)], next);
    if (!spec.state_box(t + 1).contains(next)) throw InfeasibleState(t + 1, next);
    tr.inputs.push_back(std::move(u));
    tr.states.push_back(std::move(next));
  }
  tr.objective_value = evaluate_tail(spec.objective, spec.t0, start, tr.inputs, tr.states);
  return tr;
}

Trajectory trajectory_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0,
                          const std::vector<Vec>& disturbances) {
  return trajectory_map(spec, policy, x0, disturbances, spec.t0);
}

Vec state_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0, int t,
              const std::vector<Vec>& disturbances, int start) {
  if (t < start || t > spec.T) throw InvalidArgument("state map stage outside the horizon");
  if (disturbances.size() < static_cast<std::size_t>(t - start)) {
    throw InvalidArgument("disturbance sequence shorter than the requested stage");
  }
  Vec x(x0.begin(), x0.end()), next(spec.n);
  for (int s = start; s < t; ++s) {
    Vec u = policy(x, s);
    if (!spec.input_box.contains(u)) throw InfeasibleInput(s, u);
    spec.dynamics(x, u, s, disturbances[static_cast<std::size_t>(s - start)], next);
    if (!spec.state_box(s + 1).contains(next)) throw InfeasibleState(s + 1, next);
    x.swap(next);
  }
  return x;
}

Vec state_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0, int t,
              const std::vector<Vec>& disturbances) {
  return state_map(spec, policy, x0, t, disturbances, spec.t0);
}

QuadratureRule QuadratureRule::gauss_hermite_1d(std::size_t k) {
  if (k < 1) throw InvalidArgument("Gauss-Hermite rule needs at least one node");
  // Golub-Welsch: the Jacobi matrix of the monic probabilists' Hermite
  // polynomials has zero diagonal and off-diagonal sqrt(i).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 1; i < k; ++i) {
    double b = std::sqrt(static_cast<double>(i));
    J(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i)) = b;
    J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Vec x(k), w(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = es.eigenvalues()(static_cast<Eigen::Index>(i));
    double v0 = es.eigenvectors()(0, static_cast<Eigen::Index>(i));
    w[i] = v0 * v0;
  }
  // Enforce exact symmetry about zero.
  for (std::size_t i = 0; i < k / 2; ++i) {
    std::size_t j = k - 1 - i;
    double node = 0.5 * (x[j] - x[i]);
    double weight = 0.5 * (w[i] + w[j]);
    x[i] = -node;
    x[j] = node;
    w[i] = w[j] = weight;
  }
  if (k % 2 == 1) x[k / 2] = 0.0;
  QuadratureRule rule;
  for (std::size_t i = 0; i < k; ++i) rule.nodes.push_back({x[i]});
  rule.weights = w;
  return from_nodes(std::move(rule.nodes), std::move(rule.weights));
}

QuadratureRule QuadratureRule::gauss_hermite(std::size_t q, std::size_t k) {
  if (q < 1) throw InvalidArgument("quadrature dimension must be at least 1");
  QuadratureRule base = gauss_hermite_1d(k);
  QuadratureRule rule;
  rule.nodes.push_back({});
  rule.weights.push_back(1.0);
  for (std::size_t d = 0; d < q; ++d) {
    QuadratureRule next;
    for (std::size_t a = 0; a < rule.size(); ++a) {
      for (std::size_t b = 0; b < base.size(); ++b) {
        Vec node = rule.nodes[a];
        node.push_back(base.nodes[b][0]);
        next.nodes.push_back(std::move(node));
        next.weights.push_back(rule.weights[a] * base.weights[b]);
      }
    }
    rule = std::move(next);
  }
  return rule;
}

QuadratureRule QuadratureRule::monte_carlo(std::size_t q, std::size_t count, std::uint64_t seed) {
  if (q < 1 || count < 1) throw InvalidArgument("Monte-Carlo rule needs q >= 1 and at least one sample");
  QuadratureRule rule;
  CounterRng rng(seed, 0x51ULL);
  for (std::size_t i = 0; i < count; ++i) {
    Vec v(q);
    standard_normal_sampler(rng, v);
    rule.nodes.push_back(std::move(v));
  }
  rule.weights.assign(count, 1.0 / static_cast<double>(count));
  return rule;
}

QuadratureRule QuadratureRule::standard(std::size_t q, std::size_t k, std::uint64_t seed) {
  if (q <= 3) return gauss_hermite(q, k);
  return monte_carlo(q, k * k * k, seed);
}

QuadratureRule QuadratureRule::from_nodes(std::vector<Vec> nodes, Vec weights) {
  if (nodes.empty() || nodes.size() != weights.size()) throw InvalidArgument("quadrature needs matching nodes and weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("quadrature weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidArgument("quadrature weights sum to zero");
  for (double& w : weights) w /= total;
  for (const Vec& v : nodes) {
    if (v.size() != nodes.front().size()) throw InvalidArgument("quadrature nodes differ in dimension");
  }
  QuadratureRule rule;
  rule.nodes = std::move(nodes);
  rule.weights = std::move(weights);
  return rule;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("normal quantile needs p in (0, 1)");
  // Acklam's rational approximation followed by one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::vector<Eigen::MatrixXd> covariance_recursion(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int steps) {
  std::vector<Eigen::MatrixXd> out;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(A.rows(), A.rows());
  Eigen::MatrixXd BBt = B * B.transpose();
  out.push_back(S);
  for (int s = 0; s < steps; ++s) {
    S = A * S * A.transpose() + BBt;
    out.push_back(S);
  }
  return out;
}

namespace {

Vec random_input(const Box& U, CounterRng& rng) {
  Vec u(U.dim());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = rng.uniform(U.lower[i], U.upper[i]);
  return u;
}

}  // namespace

CompactCover build_compact_cover(const StochasticSpec& spec, double epsilon, const CoverOptions& opts) {
  spec.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("escape tolerance must lie in (0, 1)");
  if (!spec.input_box.bounded()) throw InvalidArgument("compact cover needs a bounded input box");
  CompactCover cover;
  cover.t0 = spec.t0;
  cover.epsilon = epsilon;
  cover.boxes = spec.state_boxes;

  std::vector<bool> in_block(spec.n, false);
  if (spec.linear_block) {
    const LinearGaussianBlock& blk = *spec.linear_block;
    const std::size_t p = blk.coords.size();
    for (std::size_t c : blk.coords) in_block[c] = true;
    cover.multiplier = opts.safety * normal_quantile(1.0 - epsilon / (2.0 * static_cast<double>(p)));
    auto cov = covariance_recursion(blk.A, blk.B, spec.T - spec.t0);
    // Means follow the dynamics at v = 0 so a noiseless block reproduces the
    // rollout bit for bit.
    Vec mean = spec.x0, next(spec.n), zero(spec.q, 0.0);
    Vec u_mid(spec.m);
    for (std::size_t i = 0; i < spec.m; ++i) u_mid[i] = 0.5 * (spec.input_box.lower[i] + spec.input_box.upper[i]);
    for (int t = spec.t0; t <= spec.T; ++t) {
      const auto s = static_cast<std::size_t>(t - spec.t0);
      Box& box = cover.boxes[s];
      for (std::size_t k = 0; k < p; ++k) {
        std::size_t c = blk.coords[k];
        double sd = std::sqrt(std::max(0.0, cov[s](static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
        double lo = mean[c] - cover.multiplier * sd;
        double hi = mean[c] + cover.multiplier * sd;
        box.lower[c] = std::max(lo, spec.state_box(t).lower[c]);
        box.upper[c] = std::min(hi, spec.state_box(t).upper[c]);
      }
      if (t == spec.T) break;
      spec.dynamics(mean, u_mid, t, zero, next);
      Box clip = spec.state_box(t + 1);
      for (std::size_t i = 0; i < spec.n; ++i) {
        mean[i] = in_block[i] ? next[i] : std::clamp(next[i], clip.lower[i], clip.upper[i]);
      }
    }
  }
  for (const Box& b : cover.boxes) {
    if (!b.bounded()) throw InvalidArgument("state coordinate is unbounded and not covered by a linear Gaussian block");
  }
  if (!cover.boxes.front().contains(spec.x0)) throw InvalidArgument("x0 lies outside the compact cover");

  // Validation: per-stage fraction of simulated paths outside H_t on the
  // block coordinates. Other coordinates are clamped into X_t, since leaving
  // them is an input infeasibility rather than an escape.
  const std::size_t N = opts.validation_paths;
  if (N > 0 && spec.linear_block) {
    std::vector<std::size_t> escapes(static_cast<std::size_t>(spec.T - spec.t0), 0);
    for (std::size_t path = 0; path < N; ++path) {
      CounterRng rng(opts.seed, path);
      Vec x = spec.x0, next(spec.n), v(spec.q);
      for (int t = spec.t0; t < spec.T; ++t) {
        Vec u = opts.policy ? opts.policy(x, t) : random_input(spec.input_box, rng);
        standard_normal_sampler(rng, v);
        spec.dynamics(x, u, t, v, next);
        const Box& H = cover.at(t + 1);
        bool escaped = false;
        for (std::size_t i = 0; i < spec.n; ++i) {
          if (in_block[i]) {
            escaped = escaped || !(next[i] >= H.lower[i] && next[i] <= H.upper[i]);
          } else {
            next[i] = std::clamp(next[i], spec.state_box(t + 1).lower[i], spec.state_box(t + 1).upper[i]);
          }
        }
        if (escaped) ++escapes[static_cast<std::size_t>(t - spec.t0)];
        x.swap(next);
      }
    }
    std::size_t worst = *std::max_element(escapes.begin(), escapes.end());
    cover.achieved_escape = static_cast<double>(worst) / static_cast<double>(N);
    double allowed = epsilon + 3.0 * std::sqrt(epsilon / static_cast<double>(N));
    if (cover.achieved_escape > allowed) throw ValidationFailed(cover.achieved_escape, epsilon);
  }
  return cover;
}

DiscreteStochasticProblem discretize_stochastic(const StochasticSpec& spec, const CompactCover& cover,
                                                const std::vector<std::size_t>& k_state,
                                                const std::vector<std::size_t>& k_input, QuadratureRule rule) {
  spec.validate();
  if (!spec.is_additive()) throw InvalidArgument("discretize_stochastic needs an additive objective; augment first");
  if (cover.boxes.size() != spec.state_boxes.size()) throw InvalidArgument("cover has the wrong number of stages");
  if (rule.dim() != spec.q) throw InvalidArgument("quadrature dimension differs from q");
  DiscreteStochasticProblem d;
  d.spec = spec;
  d.cover = cover;
  d.grids = make_stage_grids(cover.boxes, spec.t0, spec.input_box, k_state, k_input);
  d.rule = std::move(rule);
  return d;
}

namespace {

/// Evaluates c_t(x, u) + E[F(proj(f(x, u, t, v)), t + 1)] for one input.
/// Returns false when some node leaves X_{t+1}.
class StochasticBackup {
 public:
  StochasticBackup(const DiscreteStochasticProblem& d, bool interpolate)
      : d_(d), interpolate_(interpolate), ys_(d.rule.size(), Vec(d.spec.n)) {}

  bool operator()(int t, ConstVec x, ConstVec u, const TensorGrid& gn, const Vec& next_values, double& out) {
    const StochasticSpec& spec = d_.spec;
    const Box& next_box = spec.state_box(t + 1);
    const std::size_t R = d_.rule.size();
    bool all_equal = true;
    for (std::size_t r = 0; r < R; ++r) {
      spec.dynamics(x, u, t, d_.rule.nodes[r], ys_[r]);
      if (!next_box.contains(ys_[r])) return false;
      if (r > 0 && all_equal && ys_[r] != ys_[0]) all_equal = false;
    }
    double expect;
    if (all_equal) {
      expect = value(gn, next_values, ys_[0]);
    } else {
      expect = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        double w = d_.rule.weights[r];
        if (w != 0.0) expect += w * value(gn, next_values, ys_[r]);
      }
    }
    const StageCost& cost = spec.costs().stage_costs[static_cast<std::size_t>(t - spec.t0)];
    out = cost ? cost(x, u) + expect : expect;
    return true;
  }

 private:
  double value(const TensorGrid& g, const Vec& values, ConstVec y) const {
    return interpolate_ ? g.interpolate(values, y) : values[g.nearest(y)];
  }

  const DiscreteStochasticProblem& d_;
  bool interpolate_;
  std::vector<Vec> ys_;
};

}  // namespace

ValueTable solve_bellman_stochastic(const DiscreteStochasticProblem& disc, const SolveOptions& opts) {
  const StochasticSpec& spec = disc.spec;
  const AdditiveCosts& costs = spec.costs();
  ValueTable vt;
  vt.t0 = spec.t0;
  vt.T = spec.T;
  vt.grids = disc.grids.states;
  vt.inputs = disc.grids.inputs;
  vt.interpolated = opts.interpolate;
  const auto stages = static_cast<std::size_t>(spec.T - spec.t0);
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
    Vec& layer = vt.values[s];
    auto& arg = vt.argmin[s];
    layer.assign(g.size(), 0.0);
    arg.assign(g.size(), -1);
    parallel_for(g.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
      StochasticBackup backup(disc, opts.interpolate);
      Vec x(spec.n);
      for (std::size_t i = begin; i < end; ++i) {
        g.point(i, x);
        double best = std::numeric_limits<double>::infinity();
        std::int32_t best_j = -1;
        bool any_feasible = false;
        for (std::size_t j = 0; j < inputs.size(); ++j) {
          double total;
          if (!backup(t, x, inputs[j], gn, next_values, total)) continue;
          any_feasible = true;
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

FeedbackPolicy lift_policy_stochastic(const TabularPolicy& tab, const DiscreteStochasticProblem& disc,
                                      const LiftOptions& opts, const ValueTable* vt) {
  FeasibilityTest feasible = [&disc](ConstVec x, ConstVec u, int t) {
    const StochasticSpec& spec = disc.spec;
    if (!spec.input_box.contains(u)) return false;
    Vec y(spec.n);
    for (const Vec& v : disc.rule.nodes) {
      spec.dynamics(x, u, t, v, y);
      if (!spec.state_box(t + 1).contains(y)) return false;
    }
    return true;
  };
  FeedbackPolicy nearest = lift_nearest(tab, feasible, opts.bisection_steps);
  if (opts.mode == LiftMode::kNearest) return nearest;
  if (vt == nullptr) throw InvalidArgument("lookahead lift needs the value table");
  return [&tab, &disc, vt, nearest](ConstVec x, int t) -> Vec {
    StochasticBackup backup(disc, vt->interpolated);
    Vec u(tab.inputs.dim()), best_u;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < tab.inputs.size(); ++j) {
      tab.inputs.point(j, u);
      double total;
      if (!backup(t, x, u, vt->grid(t + 1), vt->layer(t + 1), total)) continue;
      if (total < best) {
        best = total;
        best_u = u;
      }
    }
    if (best_u.empty()) return nearest(x, t);
    return best_u;
  };
}

std::vector<Vec> sample_disturbances(const StochasticSpec& spec, std::uint64_t seed, std::uint64_t index, int start,
                                     const DisturbanceSampler& sampler) {
  CounterRng rng(seed, index);
  std::vector<Vec> out(static_cast<std::size_t>(spec.T - start), Vec(spec.q));
  for (Vec& v : out) {
    if (sampler) {
      sampler(rng, v);
    } else {
      standard_normal_sampler(rng, v);
    }
  }
  return out;
}

MonteCarloResult expected_cost_monte_carlo(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0,
                                           std::size_t N, std::uint64_t seed, const MonteCarloOptions& opts) {
  if (N < 1) throw InvalidArgument("Monte-Carlo evaluation needs at least one sample");
  const int start = opts.start.value_or(spec.t0);
  Vec costs(N, 0.0);
  std::vector<std::string> errors(N);
  std::vector<char> ok(N, 0);
  parallel_for(N, opts.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto dist = sample_disturbances(spec, seed, i, start, opts.sampler);
      try {
        costs[i] = trajectory_map(spec, policy, x0, dist, start).objective_value;
        ok[i] = 1;
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  });
  MonteCarloResult res;
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!ok[i]) {
      if (res.failures++ == 0) res.first_error = errors[i];
      continue;
    }
    ++res.samples;
    double delta = costs[i] - mean;
    mean += delta / static_cast<double>(res.samples);
    m2 += delta * (costs[i] - mean);
  }
  res.mean = res.samples ? mean : std::numeric_limits<double>::quiet_NaN();
  if (res.samples >= 2) {
    double var = m2 / static_cast<double>(res.samples - 1);
    res.std_error = std::sqrt(var / static_cast<double>(res.samples));
  }
  return res;
}

ProblemSpec zero_noise_problem(const StochasticSpec& spec) {
  ProblemSpec out;
  out.t0 = spec.t0;
  out.T = spec.T;
  out.n = spec.n;
  out.m = spec.m;
  out.state_boxes = spec.state_boxes;
  out.input_box = spec.input_box;
  out.objective = spec.objective;
  out.x0 = spec.x0;
  auto f = spec.dynamics;
  Vec zero(spec.q, 0.0);
  out.dynamics = [f, zero](ConstVec x, ConstVec u, int t, MutVec next) { f(x, u, t, zero, next); };
  return out;
}

}  // namespace fsdp
