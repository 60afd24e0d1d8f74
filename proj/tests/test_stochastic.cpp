#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fsdp/errors.hpp"
#include "fsdp/fixtures.hpp"
#include "fsdp/stochastic.hpp"
#include "generators.hpp"

using namespace fsdp;

namespace {

double quad_moment(const QuadratureRule& r, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i][0], p);
  return s;
}

/// Rounding scale of quad_moment: the same sum over absolute values.
double abs_moment(const QuadratureRule& r, int p) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(std::abs(r.nodes[i][0]), p);
  return s;
}

double double_factorial(int n) {
  double f = 1.0;
  for (int i = n; i > 1; i -= 2) f *= i;
  return f;
}

DiscreteStochasticProblem tiny_problem(const testgen::TinyMdp& m) {
  StochasticSpec spec = m.spec();
  CompactCover cover = build_compact_cover(spec, 1e-3);
  return discretize_stochastic(spec, cover, {2}, {2}, m.rule());
}

}  // namespace

TEST(Quadrature, GaussHermiteIntegratesPolynomialsExactly) {
  for (std::size_t k = 1; k <= 12; ++k) {
    QuadratureRule r = QuadratureRule::gauss_hermite_1d(k);
    ASSERT_EQ(r.size(), k);
    double wsum = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-13);
    for (int p = 1; p <= static_cast<int>(2 * k - 1); ++p) {
      double expected = p % 2 == 1 ? 0.0 : double_factorial(p - 1);
      EXPECT_NEAR(quad_moment(r, p), expected, 1e-12 * (1.0 + abs_moment(r, p))) << "k = " << k << " p = " << p;
    }
  }
}

TEST(Quadrature, TensorProductAndMonteCarlo) {
  QuadratureRule r = QuadratureRule::gauss_hermite(2, 4);
  ASSERT_EQ(r.size(), 16u);
  ASSERT_EQ(r.dim(), 2u);
  double exy2 = 0.0, ex2y2 = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    exy2 += r.weights[i] * r.nodes[i][0] * r.nodes[i][1] * r.nodes[i][1];
    ex2y2 += r.weights[i] * r.nodes[i][0] * r.nodes[i][0] * r.nodes[i][1] * r.nodes[i][1];
  }
  EXPECT_NEAR(exy2, 0.0, 1e-13);
  EXPECT_NEAR(ex2y2, 1.0, 1e-12);
  QuadratureRule mc = QuadratureRule::monte_carlo(1, 50000, 3);
  EXPECT_NEAR(quad_moment(mc, 2), 1.0, 0.05);
  EXPECT_EQ(QuadratureRule::standard(4, 3).size(), 27u);
  QuadratureRule f = QuadratureRule::from_nodes({{0.0}, {1.0}}, {1.0, 3.0});
  EXPECT_DOUBLE_EQ(f.weights[1], 0.75);
}

TEST(NormalQuantile, InvertsTheCdf) {
  for (double p : {1e-9, 0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.9995}) {
    double z = normal_quantile(p);
    EXPECT_NEAR(0.5 * std::erfc(-z / std::sqrt(2.0)), p, 1e-9 * std::max(1.0, p / (1 - p)));
  }
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_THROW(normal_quantile(0.0), InvalidArgument);
  EXPECT_THROW(normal_quantile(1.0), InvalidArgument);
}

TEST(CovarianceRecursion, MatchesClosedFormScalar) {
  Eigen::MatrixXd A(1, 1), B(1, 1);
  A << 0.8;
  B << 0.6;
  auto cov = covariance_recursion(A, B, 10);
  ASSERT_EQ(cov.size(), 11u);
  for (int t = 0; t <= 10; ++t) {
    double expected = 0.36 * (1.0 - std::pow(0.64, t)) / (1.0 - 0.64);
    EXPECT_NEAR(cov[static_cast<std::size_t>(t)](0, 0), expected, 1e-14);
  }
}

TEST(CompactCover, BoxesWidenWithSmallerEpsilon) {
  solar::GaussMarkovModel model = fixtures::tempe_solar_model(1);
  StochasticSpec spec;
  spec.t0 = 0;
  spec.T = 4;
  spec.n = 1;
  spec.m = 1;
  spec.q = 1;
  const double a = model.A(0, 0), b = model.B(0, 0);
  spec.dynamics = [a, b](ConstVec x, ConstVec, int, ConstVec v, MutVec next) { next[0] = a * x[0] + b * v[0]; };
  spec.state_boxes.assign(5, Box({-INFINITY}, {INFINITY}));
  spec.input_box = Box({0.0}, {1.0});
  spec.x0 = {0.0};
  AdditiveCosts c;
  c.stage_costs.assign(4, nullptr);
  c.terminal_cost = [](ConstVec) { return 0.0; };
  spec.objective = c;
  spec.linear_block = LinearGaussianBlock{{0}, model.A, model.B};
  CompactCover wide = build_compact_cover(spec, 1e-4), narrow = build_compact_cover(spec, 1e-1);
  EXPECT_EQ(wide.at(0).lower[0], 0.0);
  EXPECT_EQ(wide.at(0).upper[0], 0.0);
  for (int t = 1; t <= 4; ++t) {
    EXPECT_GT(wide.at(t).upper[0], narrow.at(t).upper[0]);
    EXPECT_LT(wide.at(t).lower[0], narrow.at(t).lower[0]);
  }
  EXPECT_LE(narrow.achieved_escape, 0.1 + 3 * std::sqrt(0.1 / 10000));
  spec.linear_block.reset();
  EXPECT_THROW(build_compact_cover(spec, 1e-3), InvalidArgument);
}

TEST(StochasticBellman, TinyMdpsMatchPolicyEnumeration) {
  std::mt19937_64 g(51);
  for (int trial = 0; trial < 40; ++trial) {
    testgen::TinyMdp m = testgen::random_tiny_mdp(g);
    DiscreteStochasticProblem d = tiny_problem(m);
    ValueTable vt = solve_bellman_stochastic(d);
    for (int x0 = 0; x0 < 2; ++x0) {
      std::size_t i = vt.grid(0).nearest(Vec{static_cast<double>(x0)});
      EXPECT_NEAR(vt.layer(0)[i], m.enumerate_optimum(x0), 1e-12);
    }
  }
}

TEST(StochasticBellman, CounterexampleTwoValues) {
  StochasticSpec spec = fixtures::counterexample2();
  EXPECT_TRUE(spec.is_additive());
  MonteCarloOptions mc;
  mc.sampler = fixtures::counterexample2_sampler();
  MonteCarloResult from0 = expected_cost_monte_carlo(spec, fixtures::counterexample2_policy(), Vec{0.0}, 2000, 1, mc);
  EXPECT_EQ(from0.mean, -2.0);
  EXPECT_EQ(from0.failures, 0u);
  mc.start = 1;
  MonteCarloResult from1 = expected_cost_monte_carlo(spec, fixtures::counterexample2_policy(), Vec{1.0}, 2000, 1, mc);
  EXPECT_EQ(from1.mean, 0.0);
}

TEST(StochasticBellman, MonteCarloIsThreadIndependent) {
  StochasticSpec spec = fixtures::counterexample2();
  FeedbackPolicy half = [](ConstVec x, int) { return Vec{x[0] < 0.5 ? 1.0 : 0.0}; };
  MonteCarloOptions a, b;
  a.sampler = b.sampler = fixtures::counterexample2_sampler();
  b.threads = 5;
  MonteCarloResult r1 = expected_cost_monte_carlo(spec, half, Vec{0.0}, 3000, 9, a);
  MonteCarloResult r5 = expected_cost_monte_carlo(spec, half, Vec{0.0}, 3000, 9, b);
  EXPECT_EQ(r1.mean, r5.mean);
  EXPECT_EQ(r1.std_error, r5.std_error);
  // u(0) = 1 always, u(1) = 1 with probability 1/2.
  EXPECT_NEAR(r1.mean, -1.5, 4 * r1.std_error);
}

TEST(StochasticMaps, StateAndTrajectoryMapsAgree) {
  std::mt19937_64 g(61);
  testgen::TinyMdp m = testgen::random_tiny_mdp(g);
  StochasticSpec spec = m.spec();
  FeedbackPolicy pol = [](ConstVec x, int t) { return Vec{(t + (x[0] > 0.5 ? 1 : 0)) % 2 == 0 ? 1.0 : 0.0}; };
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto v = sample_disturbances(spec, 3, i, 0, [](CounterRng& r, MutVec out) { out[0] = r.uniform(); });
    ASSERT_EQ(v.size(), 3u);
    Trajectory tr = trajectory_map(spec, pol, Vec{0.0}, v);
    for (int t = 0; t <= 3; ++t) EXPECT_EQ(state_map(spec, pol, Vec{0.0}, t, v), tr.states[static_cast<std::size_t>(t)]);
    double direct = m.terminal[tr.states[3][0] > 0.5 ? 1 : 0];
    for (int t = 0; t < 3; ++t) {
      direct += m.cost[t][tr.states[static_cast<std::size_t>(t)][0] > 0.5 ? 1 : 0]
                      [tr.inputs[static_cast<std::size_t>(t)][0] > 0.5 ? 1 : 0];
    }
    EXPECT_DOUBLE_EQ(tr.objective_value, direct);
  }
}

TEST(StochasticSpecs, ZeroNoiseProblemIgnoresDisturbance) {
  StochasticSpec spec = fixtures::counterexample2();
  ProblemSpec det = zero_noise_problem(spec);
  Trajectory tr = rollout_open_loop(det, {{1.0}, {1.0}});
  EXPECT_EQ(tr.states[1][0], 0.0);
  EXPECT_EQ(tr.objective_value, -2.0);
  StochasticSpec bad = spec;
  bad.q = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}
