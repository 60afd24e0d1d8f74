#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fsdp/errors.hpp"
#include "fsdp/fixtures.hpp"
#include "fsdp/representation.hpp"
#include "generators.hpp"

using namespace fsdp;

namespace {

struct RandomTrajectory {
  std::vector<Vec> inputs;
  std::vector<Vec> states;
};

RandomTrajectory random_trajectory(std::mt19937_64& g, const Horizon& h) {
  RandomTrajectory r;
  for (std::size_t i = 0; i <= h.stages(); ++i) {
    Vec x(h.n);
    for (double& v : x) v = testgen::uniform_real(g, -2, 2);
    r.states.push_back(x);
    if (i < h.stages()) {
      Vec u(h.m);
      for (double& v : u) v = testgen::uniform_real(g, -2, 2);
      r.inputs.push_back(u);
    }
  }
  return r;
}

Horizon random_horizon(std::mt19937_64& g) {
  Horizon h;
  h.t0 = testgen::uniform_int(g, 0, 3);
  h.T = h.t0 + testgen::uniform_int(g, 1, 6);
  h.n = static_cast<std::size_t>(testgen::uniform_int(g, 1, 3));
  h.m = static_cast<std::size_t>(testgen::uniform_int(g, 1, 2));
  return h;
}

double term(ConstVec x, ConstVec u) { return x[0] * u[0] + 0.5 * x.back(); }

}  // namespace

TEST(Representation, AdditiveMatchesDirectSum) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 100; ++trial) {
    Horizon h = random_horizon(g);
    AdditiveCosts c;
    for (std::size_t i = 0; i < h.stages(); ++i) {
      double w = testgen::uniform_real(g, -1, 1);
      c.stage_costs.push_back([w](ConstVec x, ConstVec u) { return w * x[0] + u[0] * u[0]; });
    }
    c.terminal_cost = [](ConstVec x) { return std::sin(x[0]); };
    Representation r = additive_representation(h, c);
    auto tr = random_trajectory(g, h);
    double direct = c.terminal_cost(tr.states.back());
    for (std::size_t i = 0; i < h.stages(); ++i) direct += c.stage_costs[i](tr.states[i], tr.inputs[i]);
    EXPECT_NEAR(r.evaluate(tr.inputs, tr.states), direct, 1e-12);
    // Tails: drop the first stages.
    for (int s = h.t0; s < h.T; ++s) {
      auto k = static_cast<std::size_t>(s - h.t0);
      std::vector<Vec> ti(tr.inputs.begin() + static_cast<long>(k), tr.inputs.end());
      std::vector<Vec> ts(tr.states.begin() + static_cast<long>(k), tr.states.end());
      double tail = c.terminal_cost(tr.states.back());
      for (std::size_t i = k; i < h.stages(); ++i) tail += c.stage_costs[i](tr.states[i], tr.inputs[i]);
      EXPECT_NEAR(r.evaluate_from(s, ti, ts), tail, 1e-12);
    }
  }
}

TEST(Representation, MaxMatchesDirectMaximum) {
  std::mt19937_64 g(12);
  for (int trial = 0; trial < 100; ++trial) {
    Horizon h = random_horizon(g);
    std::vector<StageCost> terms(h.stages(), term);
    // Some null terms are skipped.
    if (h.stages() > 1) terms[0] = nullptr;
    Representation r = max_representation(h, terms, [](ConstVec x) { return x[0]; });
    auto tr = random_trajectory(g, h);
    double direct = tr.states.back()[0];
    for (std::size_t i = 0; i < h.stages(); ++i) {
      if (terms[i]) direct = std::max(direct, term(tr.states[i], tr.inputs[i]));
    }
    EXPECT_EQ(r.evaluate(tr.inputs, tr.states), direct);
    EXPECT_EQ(r.dimension(), 1u);
  }
}

TEST(Representation, VarianceMatchesDefinition) {
  std::mt19937_64 g(13);
  for (int trial = 0; trial < 100; ++trial) {
    Horizon h = random_horizon(g);
    std::vector<TerminalCost> a(h.stages() + 1, [](ConstVec x) { return x[0] - x.back() * 0.3; });
    Representation r = variance_representation(h, a);
    auto tr = random_trajectory(g, h);
    double s = 0, s2 = 0;
    for (const Vec& x : tr.states) {
      double v = x[0] - x.back() * 0.3;
      s += v;
      s2 += v * v;
    }
    double direct = s2 - s * s / static_cast<double>(h.T - h.t0);
    EXPECT_NEAR(r.evaluate(tr.inputs, tr.states), direct, 1e-10);
    EXPECT_EQ(r.dimension(), 2u);
  }
}

TEST(Representation, PNormMatchesDefinition) {
  std::mt19937_64 g(14);
  for (int trial = 0; trial < 100; ++trial) {
    Horizon h = random_horizon(g);
    std::vector<double> p{1.0, 2.0, testgen::uniform_real(g, 0.5, 4.0)};
    std::vector<std::vector<StageCost>> terms(3);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t i = 0; i < h.stages(); ++i) {
        terms[j].push_back([j](ConstVec x, ConstVec u) { return std::abs(x[0]) + static_cast<double>(j) * u[0] * u[0]; });
      }
    }
    Representation r = pnorm_representation(h, terms, p);
    auto tr = random_trajectory(g, h);
    double direct = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < h.stages(); ++i) s += std::pow(terms[j][i](tr.states[i], tr.inputs[i]), p[j]);
      direct += std::pow(s, 1.0 / p[j]);
    }
    EXPECT_NEAR(r.evaluate(tr.inputs, tr.states), direct, 1e-10 * (1.0 + std::abs(direct)));
  }
}

TEST(Representation, PNormRejectsNegativeTerms) {
  Horizon h{0, 2, 1, 1};
  std::vector<std::vector<StageCost>> terms{{[](ConstVec, ConstVec) { return 1.0; }, [](ConstVec, ConstVec) { return -1.0; }}};
  Representation r = pnorm_representation(h, terms, {2.0});
  std::vector<Vec> u{{0.0}, {0.0}}, x{{0.0}, {0.0}, {0.0}};
  EXPECT_THROW(r.evaluate(u, x), NegativeTermError);
}

TEST(Representation, CountMatchesDefinition) {
  std::mt19937_64 g(15);
  for (int trial = 0; trial < 100; ++trial) {
    Horizon h = random_horizon(g);
    auto in = [](ConstVec x, ConstVec u) { return x[0] + u[0] > 0.0; };
    auto in_T = [](ConstVec x) { return x[0] > 0.0; };
    Representation r = count_representation(h, in, in_T);
    auto tr = random_trajectory(g, h);
    double direct = in_T(tr.states.back()) ? 1.0 : 0.0;
    for (std::size_t i = 0; i < h.stages(); ++i) direct += in(tr.states[i], tr.inputs[i]) ? 1.0 : 0.0;
    EXPECT_EQ(r.evaluate(tr.inputs, tr.states), direct);
  }
}

TEST(Representation, CompositionsMatchPointwiseOperations) {
  std::mt19937_64 g(16);
  for (int trial = 0; trial < 100; ++trial) {
    Horizon h = random_horizon(g);
    AdditiveCosts c;
    c.stage_costs.assign(h.stages(), [](ConstVec x, ConstVec u) { return x[0] - u[0]; });
    c.terminal_cost = [](ConstVec x) { return x.back(); };
    Representation a = additive_representation(h, c);
    Representation m = max_representation(h, std::vector<StageCost>(h.stages(), term), nullptr);
    auto tr = random_trajectory(g, h);
    double va = a.evaluate(tr.inputs, tr.states), vm = m.evaluate(tr.inputs, tr.states);
    Representation s = compose_sum(a, m);
    Representation p = compose_product(a, m);
    Representation u = compose_unary(m, [](double z) { return 3.0 * z * z + 1.0; });
    EXPECT_NEAR(s.evaluate(tr.inputs, tr.states), va + vm, 1e-12);
    EXPECT_NEAR(p.evaluate(tr.inputs, tr.states), va * vm, 1e-12);
    EXPECT_NEAR(u.evaluate(tr.inputs, tr.states), 3.0 * vm * vm + 1.0, 1e-12);
    EXPECT_EQ(s.dimension(), a.dimension() + m.dimension());
    EXPECT_EQ(u.dimension(), m.dimension());
  }
}

TEST(Representation, ConstantAndNaive) {
  std::mt19937_64 g(17);
  Horizon h{1, 4, 2, 1};
  auto tr = random_trajectory(g, h);
  EXPECT_EQ(constant_representation(h, 2.5).evaluate(tr.inputs, tr.states), 2.5);
  auto J = [](const std::vector<Vec>& u, const std::vector<Vec>& x) {
    // Not forward separable in any low dimension: depends on the median.
    std::vector<double> v;
    for (const Vec& xi : x) v.push_back(xi[0]);
    std::sort(v.begin(), v.end());
    return v[v.size() / 2] * u[1][0];
  };
  Representation r = naive_representation(h, J);
  EXPECT_DOUBLE_EQ(r.evaluate(tr.inputs, tr.states), J(tr.inputs, tr.states));
  EXPECT_EQ(r.dimension(), 3u * (h.n + h.m));
  EXPECT_THROW(r.evaluate_from(2, {tr.inputs[1], tr.inputs[2]}, {tr.states[1], tr.states[2], tr.states[3]}),
               InvalidArgument);
}

TEST(Representation, MismatchedHorizonsAreRejected) {
  Horizon h1{0, 3, 1, 1}, h2{0, 4, 1, 1};
  Representation a = constant_representation(h1, 1.0);
  Representation b = constant_representation(h2, 1.0);
  EXPECT_THROW(compose_sum(a, b), HorizonMismatch);
  EXPECT_THROW(compose_product(a, b), HorizonMismatch);
  std::vector<Vec> u{{0.0}, {0.0}}, x{{0.0}, {0.0}, {0.0}};
  EXPECT_THROW(a.evaluate(u, x), InvalidArgument);
}

TEST(Representation, CounterexampleObjectiveByHand) {
  ProblemSpec spec = fixtures::counterexample1(1.0);
  // u = (1, -1, 1): x = 0, 1, 0, 1; J = -1 - 1 - 0.5 + 1.
  std::vector<Vec> u{{1.0}, {-1.0}, {1.0}}, x{{0.0}, {1.0}, {0.0}, {1.0}};
  EXPECT_DOUBLE_EQ(evaluate_objective(spec, u, x), -1.5);
  // Tail from s = 2 at x = 0 with u = 1: -0.5 + max(0, 1).
  EXPECT_DOUBLE_EQ(evaluate_tail(spec, 2, {{1.0}}, {{0.0}, {1.0}}), 0.5);
}
