#pragma once

// Hand-rolled random instance generators shared by the property tests and
// the acceptance binary.

#include <algorithm>
#include <cmath>
#include <random>

#include "fsdp/bellman.hpp"
#include "fsdp/brute_force.hpp"
#include "fsdp/stochastic.hpp"

namespace fsdp::testgen {

inline int uniform_int(std::mt19937_64& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Small additive problem on integer grids. States live on {-L..L}^n with
/// spacing 1, inputs on an odd integer grid, dynamics are integer-affine
/// with an optional half-step offset so that projection ties to the lower
/// node are exercised. Every cost is an integer on grid points, so values
/// computed in any summation order agree exactly.
struct RandomInstance {
  ProblemSpec spec;
  StageGrids grids;
};

inline RandomInstance random_additive_instance(std::mt19937_64& g) {
  RandomInstance r;
  ProblemSpec& s = r.spec;
  s.n = static_cast<std::size_t>(uniform_int(g, 1, 2));
  s.m = 1;
  s.t0 = uniform_int(g, 0, 2);
  s.T = s.t0 + uniform_int(g, 1, 4);
  const int L = uniform_int(g, 1, 3);
  const int um = uniform_int(g, 1, 3);

  struct Coeffs {
    std::vector<double> a, b, c, half;
  };
  Coeffs k;
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) k.a.push_back(uniform_int(g, -1, 1));
    k.b.push_back(uniform_int(g, -1, 1));
    k.c.push_back(uniform_int(g, -1, 1));
    k.half.push_back(uniform_int(g, 0, 3) == 0 ? 0.5 : 0.0);
  }
  const std::size_t n = s.n;
  s.dynamics = [k, n](ConstVec x, ConstVec u, int t, MutVec next) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = k.c[i] + k.b[i] * u[0] + k.half[i] * ((t % 2 == 0) ? 1.0 : -1.0);
      for (std::size_t j = 0; j < n; ++j) v += k.a[i * n + j] * x[j];
      next[i] = v;
    }
  };
  for (int t = s.t0; t <= s.T; ++t) {
    Vec lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = -L + (uniform_int(g, 0, 4) == 0 ? 1 : 0);
      hi[i] = L;
    }
    s.state_boxes.emplace_back(lo, hi);
  }
  s.input_box = Box({static_cast<double>(-um)}, {static_cast<double>(um)});
  s.x0.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) s.x0[i] = uniform_int(g, static_cast<int>(s.state_boxes[0].lower[i]), L);

  AdditiveCosts costs;
  for (int t = s.t0; t < s.T; ++t) {
    std::vector<double> w;
    for (std::size_t i = 0; i < n + 3; ++i) w.push_back(uniform_int(g, -3, 3));
    costs.stage_costs.push_back([w, n](ConstVec x, ConstVec u) {
      double c = w[n] * u[0] + w[n + 1] * std::abs(u[0]) + w[n + 2];
      for (std::size_t i = 0; i < n; ++i) c += w[i] * x[i] + std::abs(x[i] * u[0]);
      return c;
    });
  }
  std::vector<double> tw;
  for (std::size_t i = 0; i < n; ++i) tw.push_back(uniform_int(g, -3, 3));
  costs.terminal_cost = [tw, n](ConstVec x) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += tw[i] * x[i] + x[i] * x[i];
    return c;
  };
  s.objective = costs;

  // Integer grids over each stage box: number of points = width + 1 (<= 7).
  r.grids.t0 = s.t0;
  for (const Box& b : s.state_boxes) {
    std::vector<GridSpec> axes;
    for (std::size_t i = 0; i < n; ++i) {
      axes.emplace_back(b.lower[i], b.upper[i], static_cast<std::size_t>(b.upper[i] - b.lower[i]) + 1);
    }
    r.grids.states.emplace_back(axes);
  }
  r.grids.inputs = TensorGrid({GridSpec(-um, um, static_cast<std::size_t>(2 * um + 1))});
  return r;
}

/// Two-state, two-action MDP over a horizon of three stages, written as a
/// stochastic problem whose disturbance takes `kLevels` equally likely
/// values. The next state is 1 when the disturbance falls below the
/// transition probability, and probabilities are multiples of 1/kLevels, so
/// the quadrature realizes them exactly.
struct TinyMdp {
  static constexpr int kStages = 3;
  static constexpr int kLevels = 8;
  /// prob_one[t][x][u] = P(x' = 1 | x, u, t).
  double prob_one[kStages][2][2];
  double cost[kStages][2][2];
  double terminal[2];

  StochasticSpec spec() const;
  QuadratureRule rule() const;
  /// Exhaustive minimum over the 2^(2 * kStages) deterministic Markov
  /// policies of the exactly propagated expected cost from x at stage 0.
  double enumerate_optimum(int x0) const;
};

inline TinyMdp random_tiny_mdp(std::mt19937_64& g) {
  TinyMdp m{};
  for (int t = 0; t < TinyMdp::kStages; ++t) {
    for (int x = 0; x < 2; ++x) {
      for (int u = 0; u < 2; ++u) {
        m.prob_one[t][x][u] = uniform_int(g, 0, TinyMdp::kLevels) / static_cast<double>(TinyMdp::kLevels);
        m.cost[t][x][u] = uniform_real(g, -1.0, 1.0);
      }
    }
  }
  m.terminal[0] = uniform_real(g, -1.0, 1.0);
  m.terminal[1] = uniform_real(g, -1.0, 1.0);
  return m;
}

inline StochasticSpec TinyMdp::spec() const {
  StochasticSpec s;
  s.t0 = 0;
  s.T = kStages;
  s.n = 1;
  s.m = 1;
  s.q = 1;
  const TinyMdp copy = *this;
  s.dynamics = [copy](ConstVec x, ConstVec u, int t, ConstVec v, MutVec next) {
    const int xi = x[0] > 0.5 ? 1 : 0, ui = u[0] > 0.5 ? 1 : 0;
    next[0] = v[0] < copy.prob_one[t][xi][ui] ? 1.0 : 0.0;
  };
  s.state_boxes.assign(kStages + 1, Box({0.0}, {1.0}));
  s.input_box = Box({0.0}, {1.0});
  s.x0 = {0.0};
  AdditiveCosts c;
  for (int t = 0; t < kStages; ++t) {
    c.stage_costs.push_back([copy, t](ConstVec x, ConstVec u) {
      return copy.cost[t][x[0] > 0.5 ? 1 : 0][u[0] > 0.5 ? 1 : 0];
    });
  }
  c.terminal_cost = [copy](ConstVec x) { return copy.terminal[x[0] > 0.5 ? 1 : 0]; };
  s.objective = c;
  return s;
}

inline QuadratureRule TinyMdp::rule() const {
  std::vector<Vec> nodes;
  for (int i = 0; i < kLevels; ++i) nodes.push_back({(i + 0.5) / kLevels});
  return QuadratureRule::from_nodes(nodes, Vec(kLevels, 1.0));
}

inline double TinyMdp::enumerate_optimum(int x0) const {
  double best = INFINITY;
  for (int code = 0; code < (1 << (2 * kStages)); ++code) {
    double p[2] = {x0 == 0 ? 1.0 : 0.0, x0 == 1 ? 1.0 : 0.0};
    double total = 0.0;
    for (int t = 0; t < kStages; ++t) {
      double q[2] = {0.0, 0.0};
      for (int x = 0; x < 2; ++x) {
        const int u = (code >> (2 * t + x)) & 1;
        total += p[x] * cost[t][x][u];
        q[1] += p[x] * prob_one[t][x][u];
        q[0] += p[x] * (1.0 - prob_one[t][x][u]);
      }
      p[0] = q[0];
      p[1] = q[1];
    }
    total += p[0] * terminal[0] + p[1] * terminal[1];
    best = std::min(best, total);
  }
  return best;
}

}  // namespace fsdp::testgen
