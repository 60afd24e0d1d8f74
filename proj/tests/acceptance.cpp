// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cli_support.hpp"
#include "fsdp/augment.hpp"
#include "fsdp/battery.hpp"
#include "fsdp/bellman.hpp"
#include "fsdp/brute_force.hpp"
#include "fsdp/errors.hpp"
#include "fsdp/fixtures.hpp"
#include "fsdp/solar.hpp"
#include "fsdp/stochastic.hpp"
#include "generators.hpp"

using namespace fsdp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

std::vector<int> signs(const std::vector<Vec>& inputs) {
  std::vector<int> s;
  for (const Vec& u : inputs) s.push_back(static_cast<int>(std::lround(u[0])));
  return s;
}

// 1. Enumeration of the first counterexample with h = 1.
Outcome criterion1() {
  Outcome o;
  ProblemSpec spec = fixtures::counterexample1(1.0);
  StageGrids grids = fixtures::counterexample1_grids(spec, 1.0);
  const std::map<std::vector<int>, double> expected{{{0, 0, 0}, 0.0},  {{0, 0, 1}, 0.5},   {{0, 1, 0}, 2.0},
                                                    {{0, 1, -1}, 2.5}, {{1, 0, 0}, 0.0},   {{1, 0, -1}, 0.5},
                                                    {{1, -1, 0}, -1.0}, {{1, -1, 1}, -1.5}};
  std::map<std::vector<int>, double> seen;
  std::size_t count = 0;
  enumerate_feasible(spec, grids, [&](const std::vector<std::size_t>&, const Trajectory& tr) {
    seen[signs(tr.inputs)] = tr.objective_value;
    ++count;
  });
  o.require(count == 8, "8 feasible sequences (got " + std::to_string(count) + ")");
  o.require(seen == expected, "objective table");
  PrincipleReport rep = verify_principle_violation(spec, grids);
  o.require(rep.optimum.optimal_value == -1.5, "optimum -1.5");
  o.require(signs(rep.optimum.best.inputs) == std::vector<int>{1, -1, 1}, "optimal inputs (1, -1, 1)");
  o.require(rep.violations.size() == 1, "exactly one violation");
  if (!rep.violations.empty()) {
    const auto& v = rep.violations.front();
    o.require(v.stage == 2 && v.tail_value == 0.5 && v.sub_optimum == 0.0, "violation at s = 2, tail 0.5 vs 0");
    o.note("violation s=" + std::to_string(v.stage) + " tail=" + fmt(v.tail_value) + " sub=" + fmt(v.sub_optimum));
  }
  return o;
}

// 2. The augmented counterexample satisfies the principle and Bellman agrees.
Outcome criterion2() {
  Outcome o;
  ProblemSpec spec = fixtures::counterexample1(1.0);
  BruteForceResult bf = brute_force_solve(spec, fixtures::counterexample1_grids(spec, 1.0));
  AugmentedSpec aug = fixtures::counterexample1_augmented(1.0);
  StageGrids grids = fixtures::counterexample1_augmented_grids(aug, 1.0);
  PrincipleReport rep = verify_principle_violation(aug.spec, grids);
  o.require(rep.violations.empty(), "empty report on the augmented problem");
  DiscreteProblem d = discretize(aug.spec, grids);
  ValueTable vt = solve_bellman(d);
  const double F0 = vt.layer(0)[vt.grid(0).nearest(aug.spec.x0)];
  Trajectory tr = rollout_deterministic(d.as_spec(), extract_policy(vt).as_feedback());
  o.require(F0 == -1.5, "Bellman value -1.5 (got " + fmt(F0) + ")");
  o.require(tr.inputs == bf.best.inputs, "Bellman sequence equals the brute-force sequence");
  o.note("violations=" + std::to_string(rep.violations.size()) + " F=" + fmt(F0));
  return o;
}

// 3. Duan benchmark through the command line at k = 200, single-threaded.
Outcome criterion3() {
  Outcome o;
  const std::string dir = testcli::fresh_dir("acceptance_duan");
  int code = testcli::run({"solve", "--problem", "duan", "--k", "200", "--threads", "1", "--out", dir, "--no-timestamp"});
  o.require(code == 0, "exit status 0");
  if (code != 0) return o;
  auto r = testcli::results(dir);
  const double J = std::stod(r["optimum"]);
  char a[32], b[32];
  std::snprintf(a, sizeof a, "%.3g", J);
  std::snprintf(b, sizeof b, "%.3g", fixtures::kDuanOptimum);
  o.require(std::string(a) == b, "3 significant figures (" + std::string(a) + " vs " + b + ")");
  const Vec u = testcli::numbers(r["inputs"]);
  const double h = std::stod(r["input_spacing"]);
  o.require(u.size() == 3, "three inputs");
  for (std::size_t i = 0; i < u.size() && i < 3; ++i) {
    o.require(std::abs(u[i] - fixtures::kDuanInputs[i]) <= h, "u" + std::to_string(i) + " within grid spacing");
  }
  o.note("J=" + fmt(J, 9) + " u=(" + r["inputs"] + ") spacing=" + fmt(h));
  return o;
}

// 4. Bellman against brute force on random small additive instances.
Outcome criterion4() {
  Outcome o;
  std::mt19937_64 g(20240607);
  int solved = 0, attempts = 0;
  while (solved < 50 && attempts < 2000) {
    ++attempts;
    testgen::RandomInstance inst = testgen::random_additive_instance(g);
    BruteForceResult bf;
    try {
      bf = brute_force_solve(inst.spec, inst.grids);
    } catch (const NoFeasibleSequence&) {
      continue;
    }
    DiscreteProblem d = discretize(inst.spec, inst.grids);
    SolveOptions so;
    so.on_empty = EmptySetPolicy::kPrune;
    ValueTable vt = solve_bellman(d, so);
    const double F0 = vt.layer(inst.spec.t0)[vt.grid(inst.spec.t0).nearest(inst.spec.x0)];
    Trajectory tr = rollout_deterministic(d.as_spec(), extract_policy(vt).as_feedback());
    o.require(F0 == bf.optimal_value, "value on instance " + std::to_string(solved));
    o.require(tr.inputs == bf.best.inputs, "sequence on instance " + std::to_string(solved));
    ++solved;
  }
  o.require(solved == 50, "50 feasible instances generated");
  o.note(std::to_string(solved) + " instances");
  return o;
}

// 5. Stochastic Bellman against exact policy enumeration on tiny MDPs.
Outcome criterion5() {
  Outcome o;
  std::mt19937_64 g(77);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    testgen::TinyMdp m = testgen::random_tiny_mdp(g);
    StochasticSpec spec = m.spec();
    DiscreteStochasticProblem d = discretize_stochastic(spec, build_compact_cover(spec, 1e-3), {2}, {2}, m.rule());
    ValueTable vt = solve_bellman_stochastic(d);
    for (int x0 = 0; x0 < 2; ++x0) {
      double F = vt.layer(0)[vt.grid(0).nearest(Vec{static_cast<double>(x0)})];
      worst = std::max(worst, std::abs(F - m.enumerate_optimum(x0)));
    }
  }
  o.require(worst <= 1e-12, "agreement to 1e-12");
  o.note("max error " + fmt(worst, 3));
  return o;
}

// 6. The second counterexample's policy from (0, 0) and from (1, 1).
Outcome criterion6() {
  Outcome o;
  StochasticSpec spec = fixtures::counterexample2();
  MonteCarloOptions mc;
  mc.sampler = fixtures::counterexample2_sampler();
  MonteCarloResult a = expected_cost_monte_carlo(spec, fixtures::counterexample2_policy(), Vec{0.0}, 10000, 1, mc);
  o.require(std::abs(a.mean + 2.0) <= 3.0 * a.std_error, "mean from (0,0) within 3 stderr of -2");
  mc.start = 1;
  MonteCarloResult b = expected_cost_monte_carlo(spec, fixtures::counterexample2_policy(), Vec{1.0}, 10000, 1, mc);
  o.require(b.mean == 0.0, "policy realizes 0 from (1,1)");
  // Optimum from (1, 1) by the stochastic Bellman recursion.
  std::vector<Vec> nodes;
  for (int i = 0; i < 10; ++i) nodes.push_back({(i + 0.5) / 10.0});
  DiscreteStochasticProblem d =
      discretize_stochastic(spec, build_compact_cover(spec, 1e-3), {11}, {2}, QuadratureRule::from_nodes(nodes, Vec(10, 1.0)));
  ValueTable vt = solve_bellman_stochastic(d);
  const double opt = vt.layer(1)[vt.grid(1).nearest(Vec{1.0})];
  o.require(opt == -1.0, "optimum -1 from (1,1)");
  o.note("mean(0,0)=" + fmt(a.mean) + " stderr=" + fmt(a.std_error) + " mean(1,1)=" + fmt(b.mean) +
         " optimum(1,1)=" + fmt(opt));
  return o;
}

// 7. Stochastic battery pipeline with B = 0 against the deterministic one.
Outcome criterion7() {
  Outcome o;
  battery::BatteryParams p;
  battery::TariffSchedule t;
  battery::LoadProfile loads = fixtures::synthetic_day();
  int variants = 0;
  for (std::size_t dim : {1u, 3u}) {
    solar::GaussMarkovModel m = fixtures::tempe_solar_model(dim);
    m.B.setZero();
    for (bool interp : {true, false}) {
      for (LiftMode lift : {LiftMode::kLookahead, LiftMode::kNearest}) {
        battery::GridSettings gs;
        gs.interpolate = interp;
        gs.lift = lift;
        auto det = battery::solve_deterministic(p, t, loads, gs);
        auto sto = battery::solve_stochastic(p, t, loads.q_a, m, fixtures::kSolarKwPerUnit, gs);
        battery::SimulatedDay day = battery::simulate_day(*sto, loads.q_a, m, fixtures::kSolarKwPerUnit, t, 1, 0);
        const std::string tag = "p=" + std::to_string(dim) + (interp ? " interp" : " nearest-node") +
                                (lift == LiftMode::kLookahead ? " lookahead" : " nearest-lift");
        o.require(det->table.values == sto->table.values, tag + " value layers");
        o.require(det->table.argmin == sto->table.argmin, tag + " argmin layers");
        o.require(day.loads.q_s == loads.q_s, tag + " solar series");
        o.require(day.trajectory.inputs == det->rollout.inputs, tag + " inputs");
        o.require(day.cost == det->rollout.objective_value, tag + " cost");
        ++variants;
      }
    }
  }
  o.note(std::to_string(variants) + " pipeline variants compared bit for bit");
  return o;
}

// 8. Fit then simulate on the bundled weather record.
Outcome criterion8() {
  Outcome o;
  solar::NormalizedSeries data = solar::normalize(fixtures::tempe_weather());
  const std::vector<std::size_t> vars{0, 1, 2};
  solar::Correlations fitted = solar::correlations(data, vars);
  solar::GaussMarkovModel m = solar::fit(data, vars);
  solar::Correlations sim = solar::path_correlations(solar::generate(m, 100000, 5));
  solar::GaussMarkovModel refit = solar::fit_from_correlations(sim.M0, sim.M1);
  const double dA = (refit.A - m.A).cwiseAbs().maxCoeff();
  const double d0 = (sim.M0 - fitted.M0).cwiseAbs().maxCoeff();
  const double d1 = (sim.M1 - fitted.M1).cwiseAbs().maxCoeff();
  o.require(dA <= 0.05, "A recovered within 0.05");
  o.require(d0 <= 0.05, "lag-0 correlations within 0.05");
  o.require(d1 <= 0.05, "lag-1 correlations within 0.05");
  // Covariance recursion against simulated second moments.
  const std::size_t N = 20000;
  auto emp = solar::empirical_covariance(m, 10, N, 9);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 3);
  double worst_z = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const Eigen::MatrixXd& E = emp[static_cast<std::size_t>(k)];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double se = std::sqrt((S(i, i) * S(j, j) + S(i, j) * S(i, j)) / static_cast<double>(N));
        double err = std::abs(E(i, j) - S(i, j));
        if (se == 0.0) {
          o.require(err == 0.0, "zero covariance at stage 0");
        } else {
          worst_z = std::max(worst_z, err / se);
        }
      }
    }
    S = m.A * S * m.A.transpose() + m.B * m.B.transpose();
  }
  o.require(worst_z <= 5.0, "covariance within 5 standard errors");
  o.note("|dA|=" + fmt(dA, 3) + " |dM0|=" + fmt(d0, 3) + " |dM1|=" + fmt(d1, 3) + " cov z=" + fmt(worst_z, 3));
  return o;
}

// 9. Battery trends on the bundled day.
Outcome criterion9() {
  Outcome o;
  const std::string dir = testcli::fresh_dir("acceptance_battery_sweep");
  int code = testcli::run({"sweep", "--problem", "battery-det", "--k-list", "5,10,20,40", "--out", dir, "--no-timestamp"});
  o.require(code == 0, "sweep exit status 0");
  auto peak = testcli::csv_column(dir + "/sweep.csv", "peak_kw");
  auto cost = testcli::csv_column(dir + "/sweep.csv", "monthly_cost");
  o.require(peak.size() == 4 && cost.size() == 4, "four sweep rows");
  if (peak.size() == 4 && cost.size() == 4) {
    o.require(peak.back() <= peak.front(), "(a) final peak <= first");
    o.require(cost.back() <= cost.front(), "(a) final cost <= first");
    o.note("(a) peak " + fmt(peak.front(), 4) + " -> " + fmt(peak.back(), 4) + " kW, monthly " + fmt(cost.front(), 4) +
           " -> " + fmt(cost.back(), 4));
  }

  battery::BatteryParams p;
  battery::TariffSchedule t;
  battery::LoadProfile loads = fixtures::synthetic_day();
  battery::GridSettings gs;
  auto det = battery::solve_deterministic(p, t, loads, gs);
  const double sd_opt = battery::on_peak_std(battery::energy_trajectory(det->rollout), t, loads);
  const double sd_idle = battery::on_peak_std(battery::idle_trajectory(p, t), t, loads);
  o.require(sd_opt < sd_idle, "(b) on-peak std below the idle baseline");
  o.note("(b) std " + fmt(sd_opt, 4) + " vs idle " + fmt(sd_idle, 4));

  solar::GaussMarkovModel m = fixtures::tempe_solar_model(1);
  battery::GridSettings sgs;
  sgs.k_energy = sgs.k_input = sgs.k_demand = 10;
  auto sto = battery::solve_stochastic(p, t, loads.q_a, m, fixtures::kSolarKwPerUnit, sgs);
  battery::GridSettings replay;
  replay.k_energy = replay.k_input = replay.k_demand = 40;
  double worst_margin = INFINITY;
  for (std::uint64_t path = 0; path < 5; ++path) {
    battery::SimulatedDay day = battery::simulate_day(*sto, loads.q_a, m, fixtures::kSolarKwPerUnit, t, 1, path);
    auto hind = battery::solve_deterministic(p, t, day.loads, replay);
    worst_margin = std::min(worst_margin, day.cost - hind->rollout.objective_value);
    o.require(hind->rollout.objective_value <= day.cost, "(c) replay <= realized on draw " + std::to_string(path));
  }
  o.note("(c) min realized - replay over 5 draws = " + fmt(worst_margin, 4));
  return o;
}

// 10. Runtime curve of the battery sweep.
Outcome criterion10() {
  Outcome o;
  const std::string dir = testcli::fresh_dir("acceptance_runtime_sweep");
  int code = testcli::run({"sweep", "--problem", "battery-det", "--k-list", "5,10,20,40", "--out", dir, "--no-timestamp"});
  o.require(code == 0, "sweep exit status 0");
  auto k = testcli::csv_column(dir + "/sweep.csv", "k");
  auto s = testcli::csv_column(dir + "/sweep.csv", "seconds");
  o.require(s.size() == 4 && k.size() == 4, "four sweep rows");
  if (s.size() != 4 || k.size() != 4) return o;
  for (std::size_t i = 1; i < s.size(); ++i) o.require(s[i] > s[i - 1], "strictly increasing at k=" + fmt(k[i]));
  const double slope = std::log(s.back() / s.front()) / std::log(k.back() / k.front());
  o.require(slope > 1.0, "super-linear growth");
  std::string series;
  for (std::size_t i = 0; i < s.size(); ++i) series += (i ? ", " : "") + fmt(k[i]) + ":" + fmt(s[i], 3) + "s";
  o.note(series + " log-log slope " + fmt(slope, 3));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "counterexample 1 enumeration table", 1.0, criterion1},
      {2, "augmentation restores optimality", 1.0, criterion2},
      {3, "Duan benchmark at k=200", 60.0, criterion3},
      {4, "oracle equivalence on random instances", 30.0, criterion4},
      {5, "tiny MDP oracle", 10.0, criterion5},
      {6, "counterexample 2 values", 5.0, criterion6},
      {7, "degenerate noise equivalence", 0.0, criterion7},
      {8, "solar model consistency", 0.0, criterion8},
      {9, "battery trends", 600.0, criterion9},
      {10, "runtime scaling", 0.0, criterion10},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && secs >= c.budget_seconds) {
      o.pass = false;
      o.note("over the " + fmt(c.budget_seconds) + " s budget");
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << " - " << c.title << " (" << o.detail
              << "; " << fmt(secs, 3) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
