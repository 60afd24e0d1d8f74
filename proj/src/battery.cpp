#include "fsdp/battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "fsdp/errors.hpp"
#include "fsdp/io.hpp"

namespace fsdp::battery {

void BatteryParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("bleed rate must lie in (0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("efficiency must lie in (0, 1]");
  if (!(u_min <= 0.0 && u_max >= 0.0)) throw InvalidArgument("charge limits must satisfy u_min <= 0 <= u_max");
  if (!(e_min < e_max)) throw InvalidArgument("capacity bounds must satisfy e_min < e_max");
  if (!(dt > 0.0)) throw InvalidArgument("step length must be positive");
  if (!(e0 >= e_min && e0 <= e_max)) throw InvalidArgument("initial energy lies outside the capacity bounds");
}

void TariffSchedule::validate() const {
  if (T < 1) throw InvalidArgument("tariff horizon must be at least 1");
  if (!(t_on >= 0 && t_on <= t_off && t_off <= T)) throw InvalidArgument("on-peak window must satisfy 0 <= t_on <= t_off <= T");
  if (!(p_on >= 0.0 && p_off >= 0.0 && p_d >= 0.0)) throw InvalidArgument("prices must be nonnegative");
}

void LoadProfile::validate(int T) const {
  const auto len = static_cast<std::size_t>(T) + 1;
  if (q_a.size() != len || q_s.size() != len) {
    throw HorizonMismatch("load profile has " + std::to_string(q_a.size()) + " stages, tariff needs " +
                          std::to_string(len));
  }
  for (double q : q_a) {
    if (!(q >= 0.0)) throw InvalidArgument("appliance load must be nonnegative");
  }
  for (double q : q_s) {
    if (!std::isfinite(q)) throw InvalidArgument("solar profile has a non-finite value");
  }
}

LoadProfile read_load_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  const std::size_t stage = table.column("stage"), load = table.column("load_kw"), solar = table.column("solar_kw");
  LoadProfile p;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const Vec& r = table.rows[i];
    if (r.size() != table.header.size()) throw InvalidArgument(path + ": row with the wrong number of fields");
    if (r[stage] != static_cast<double>(i)) throw InvalidArgument(path + ": stages must be listed in order from 0");
    p.q_a.push_back(r[load]);
    p.q_s.push_back(r[solar]);
  }
  return p;
}

double battery_step(double e, double u, const BatteryParams& params) {
  return params.alpha * (e + params.eta * u * params.dt);
}

namespace {

/// Shared objective assembly. `solar(k, x)` gives q_s at stage k from the
/// state, so the deterministic and stochastic problems evaluate identical
/// expressions.
template <typename Solar>
Representation battery_objective(const Horizon& h, const TariffSchedule& tariff, const Vec& q_a, double dt,
                                 Solar solar) {
  AdditiveCosts energy;
  std::vector<StageCost> demand;
  for (int k = 0; k < tariff.T; ++k) {
    const double price = tariff.price(k), qa = q_a[static_cast<std::size_t>(k)];
    energy.stage_costs.push_back(
        [=](ConstVec x, ConstVec u) { return price * grid_power(qa, solar(k, x), u[0]) * dt; });
    if (tariff.on_peak(k)) {
      demand.push_back([=](ConstVec x, ConstVec u) { return std::max(0.0, grid_power(qa, solar(k, x), u[0])); });
    } else {
      demand.push_back([](ConstVec, ConstVec) { return 0.0; });
    }
  }
  const int T = tariff.T;
  const double price_T = tariff.price(T), qa_T = q_a[static_cast<std::size_t>(T)];
  energy.terminal_cost = [=](ConstVec x) { return price_T * grid_power(qa_T, solar(T, x), 0.0) * dt; };
  TerminalCost demand_T;
  if (tariff.on_peak(T)) demand_T = [=](ConstVec x) { return std::max(0.0, grid_power(qa_T, solar(T, x), 0.0)); };
  const double p_d = tariff.p_d;
  return compose_sum(additive_representation(h, energy),
                     compose_unary(max_representation(h, std::move(demand), demand_T),
                                   [p_d](double peak) { return p_d * peak; }));
}

}  // namespace

ProblemSpec build_deterministic_problem(const BatteryParams& params, const TariffSchedule& tariff,
                                        const LoadProfile& loads) {
  params.validate();
  tariff.validate();
  loads.validate(tariff.T);
  ProblemSpec spec;
  spec.t0 = 0;
  spec.T = tariff.T;
  spec.n = 1;
  spec.m = 1;
  spec.dynamics = [params](ConstVec x, ConstVec u, int, MutVec next) { next[0] = battery_step(x[0], u[0], params); };
  spec.state_boxes.assign(static_cast<std::size_t>(tariff.T) + 1, Box({params.e_min}, {params.e_max}));
  spec.input_box = Box({params.u_min}, {params.u_max});
  spec.x0 = {params.e0};
  auto q_s = loads.q_s;
  spec.objective = battery_objective(spec.horizon(), tariff, loads.q_a, params.dt,
                                     [q_s](int k, ConstVec) { return q_s[static_cast<std::size_t>(k)]; });
  spec.validate();
  return spec;
}

StochasticSpec build_stochastic_problem(const BatteryParams& params, const TariffSchedule& tariff, const Vec& q_a,
                                        const solar::GaussMarkovModel& model, double kw_per_unit) {
  params.validate();
  tariff.validate();
  model.validate();
  LoadProfile check{q_a, Vec(q_a.size(), 0.0)};
  check.validate(tariff.T);
  const std::size_t p = model.dim();
  if (p != 1 && p != 3) throw InvalidArgument("stochastic battery needs a solar model with 1 or 3 states");
  if (model.B.cols() != static_cast<Eigen::Index>(p)) throw InvalidArgument("solar model B must be square");

  StochasticSpec spec;
  spec.t0 = 0;
  spec.T = tariff.T;
  spec.n = 1 + p;
  spec.m = 1;
  spec.q = p;
  // Row-major copies keep the inner loop free of Eigen temporaries.
  Vec A(p * p), B(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      A[i * p + j] = model.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      B[i * p + j] = model.B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  spec.dynamics = [params, A, B, p](ConstVec x, ConstVec u, int, ConstVec v, MutVec next) {
    next[0] = battery_step(x[0], u[0], params);
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += A[i * p + j] * x[1 + j] + B[i * p + j] * v[j];
      next[1 + i] = acc;
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  Vec lo(1 + p, -inf), hi(1 + p, inf);
  lo[0] = params.e_min;
  hi[0] = params.e_max;
  spec.state_boxes.assign(static_cast<std::size_t>(tariff.T) + 1, Box(lo, hi));
  spec.input_box = Box({params.u_min}, {params.u_max});
  spec.x0.assign(1 + p, 0.0);
  spec.x0[0] = params.e0;
  LinearGaussianBlock block;
  for (std::size_t i = 0; i < p; ++i) block.coords.push_back(1 + i);
  block.A = model.A;
  block.B = model.B;
  spec.linear_block = block;
  auto m = std::make_shared<const solar::GaussMarkovModel>(model);
  spec.objective = battery_objective(spec.horizon(), tariff, q_a, params.dt, [m, kw_per_unit](int k, ConstVec x) {
    return solar::power_at(*m, 0, k, x[1], kw_per_unit);
  });
  spec.validate();
  return spec;
}

std::vector<Box> demand_bounds(const BatteryParams& params, const TariffSchedule& tariff, const Vec& q_a) {
  const double z_max = *std::max_element(q_a.begin(), q_a.end()) + params.u_max / 1000.0;
  std::vector<Box> out;
  for (int t = 0; t <= tariff.T; ++t) {
    out.push_back(t <= tariff.t_on ? Box({0.0}, {0.0}) : Box({0.0}, {z_max}));
  }
  return out;
}

double demand_peak(const Trajectory& tr, const TariffSchedule& tariff, const LoadProfile& loads) {
  if (tariff.t_on == tariff.t_off) {
    std::cerr << "warning: empty on-peak window, demand peak is 0\n";
    return 0.0;
  }
  double peak = 0.0;
  for (int k = tariff.t_on; k < tariff.t_off; ++k) {
    const auto i = static_cast<std::size_t>(k - tr.t0);
    double u = i < tr.inputs.size() ? tr.inputs[i][0] : 0.0;
    peak = std::max(peak, std::max(0.0, grid_power(loads.q_a[static_cast<std::size_t>(k)],
                                                   loads.q_s[static_cast<std::size_t>(k)], u)));
  }
  return peak;
}

DayCost day_cost(const Trajectory& tr, const BatteryParams& params, const TariffSchedule& tariff,
                 const LoadProfile& loads) {
  DayCost c;
  for (int k = 0; k <= tariff.T; ++k) {
    const auto i = static_cast<std::size_t>(k);
    double u = i < tr.inputs.size() ? tr.inputs[i][0] : 0.0;
    c.energy += tariff.price(k) * grid_power(loads.q_a[i], loads.q_s[i], u) * params.dt;
  }
  c.demand = tariff.p_d * demand_peak(tr, tariff, loads);
  return c;
}

Trajectory idle_trajectory(const BatteryParams& params, const TariffSchedule& tariff) {
  Trajectory tr;
  tr.states.push_back({params.e0});
  for (int k = 0; k < tariff.T; ++k) {
    tr.inputs.push_back({0.0});
    tr.states.push_back({battery_step(tr.states.back()[0], 0.0, params)});
  }
  return tr;
}

double on_peak_std(const Trajectory& tr, const TariffSchedule& tariff, const LoadProfile& loads) {
  Vec q;
  for (int k = tariff.t_on; k < tariff.t_off; ++k) {
    const auto i = static_cast<std::size_t>(k);
    q.push_back(grid_power(loads.q_a[i], loads.q_s[i], tr.inputs.at(i)[0]));
  }
  if (q.empty()) return 0.0;
  double mean = 0.0;
  for (double v : q) mean += v;
  mean /= static_cast<double>(q.size());
  double sq = 0.0;
  for (double v : q) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(q.size()));
}

void write_results_csv(const Trajectory& tr, const BatteryParams& params, const TariffSchedule& tariff,
                       const LoadProfile& loads, const std::string& path, const std::string& header_line) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  if (!header_line.empty()) out << header_line << '\n';
  out << "stage,hour,solar_kw,load_kw,battery_kw,grid_kw,energy_wh\n" << std::setprecision(12);
  for (int k = 0; k <= tariff.T; ++k) {
    const auto i = static_cast<std::size_t>(k);
    double u = i < tr.inputs.size() ? tr.inputs[i][0] : 0.0;
    out << k << ',' << k * params.dt << ',' << loads.q_s[i] << ',' << loads.q_a[i] << ',' << u / 1000.0 << ','
        << grid_power(loads.q_a[i], loads.q_s[i], u) << ',' << tr.states.at(i)[0] << '\n';
  }
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::unique_ptr<DeterministicSolution> solve_deterministic(const BatteryParams& params, const TariffSchedule& tariff,
                                                           const LoadProfile& loads, const GridSettings& grid) {
  auto sol = std::make_unique<DeterministicSolution>();
  ProblemSpec spec = build_deterministic_problem(params, tariff, loads);
  AugmentOptions ao;
  ao.separate_additive = true;
  ao.seed = grid.seed;
  sol->augmented = augment(spec, demand_bounds(params, tariff, loads.q_a), ao);
  sol->discrete = discretize(sol->augmented.spec, {grid.k_energy, grid.k_demand}, {grid.k_input});
  SolveOptions so;
  so.interpolate = grid.interpolate;
  so.threads = grid.threads;
  auto start = std::chrono::steady_clock::now();
  sol->table = solve_bellman(sol->discrete, so);
  sol->solve_seconds = seconds_since(start);
  sol->tabular = extract_policy(sol->table);
  LiftOptions lo;
  lo.mode = grid.lift;
  sol->policy = lift_policy(sol->tabular, sol->augmented.spec, lo, &sol->table);
  sol->rollout = rollout_deterministic(sol->augmented.spec, sol->policy);
  return sol;
}

std::unique_ptr<StochasticSolution> solve_stochastic(const BatteryParams& params, const TariffSchedule& tariff,
                                                     const Vec& q_a, const solar::GaussMarkovModel& model,
                                                     double kw_per_unit, const GridSettings& grid) {
  auto sol = std::make_unique<StochasticSolution>();
  sol->base = build_stochastic_problem(params, tariff, q_a, model, kw_per_unit);
  AugmentOptions ao;
  ao.separate_additive = true;
  ao.seed = grid.seed;
  sol->augmented = augment_stochastic(sol->base, demand_bounds(params, tariff, q_a), ao);
  CoverOptions co;
  co.seed = grid.seed;
  CompactCover cover = build_compact_cover(sol->augmented, grid.epsilon, co);
  std::vector<std::size_t> k_state{grid.k_energy};
  k_state.insert(k_state.end(), model.dim(), grid.k_solar);
  k_state.push_back(grid.k_demand);
  sol->discrete = discretize_stochastic(sol->augmented, cover, k_state, {grid.k_input},
                                        QuadratureRule::standard(model.dim(), grid.quadrature_nodes, grid.seed));
  SolveOptions so;
  so.interpolate = grid.interpolate;
  so.threads = grid.threads;
  auto start = std::chrono::steady_clock::now();
  sol->table = solve_bellman_stochastic(sol->discrete, so);
  sol->solve_seconds = seconds_since(start);
  sol->tabular = extract_policy(sol->table);
  LiftOptions lo;
  lo.mode = grid.lift;
  sol->policy = lift_policy_stochastic(sol->tabular, sol->discrete, lo, &sol->table);
  return sol;
}

SimulatedDay simulate_day(const StochasticSolution& sol, const Vec& q_a, const solar::GaussMarkovModel& model,
                          double kw_per_unit, const TariffSchedule& tariff, std::uint64_t seed, std::uint64_t path) {
  SimulatedDay day;
  auto v = sample_disturbances(sol.augmented, seed, path, sol.augmented.t0);
  day.trajectory = trajectory_map(sol.augmented, sol.policy, sol.augmented.x0, v);
  day.loads.q_a = q_a;
  for (std::size_t k = 0; k < day.trajectory.states.size(); ++k) {
    day.loads.q_s.push_back(solar::power_at(model, 0, static_cast<int>(k), day.trajectory.states[k][1], kw_per_unit));
  }
  day.cost = day.trajectory.objective_value;
  day.peak = demand_peak(day.trajectory, tariff, day.loads);
  return day;
}

Trajectory energy_trajectory(const Trajectory& tr) {
  Trajectory out = tr;
  for (Vec& x : out.states) x.resize(1);
  return out;
}

}  // namespace fsdp::battery
