#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fsdp/brute_force.hpp"
#include "fsdp/errors.hpp"
#include "fsdp/fixtures.hpp"
#include "fsdp/io.hpp"

namespace fsdp::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

/// Shortest text that reads back to the same double.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const Vec& v, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + num(v[i]);
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string s = trim(text);
  auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  auto size = [&] { return parse_number<std::size_t>(key, v); };
  auto real = [&] { return parse_number<double>(key, v); };
  auto integer = [&] { return parse_number<int>(key, v); };
  if (key == "run.problem") {
    problem = v;
  } else if (key == "run.k") {
    k = size();
  } else if (key == "run.k_list") {
    k_list.clear();
    for (const auto& item : split_list(v)) k_list.push_back(parse_number<std::size_t>(key, item));
  } else if (key == "run.k_solar") {
    k_solar = size();
  } else if (key == "run.nodes") {
    nodes = size();
  } else if (key == "run.epsilon") {
    epsilon = real();
  } else if (key == "run.paths") {
    paths = size();
  } else if (key == "run.seed") {
    seed = parse_number<std::uint64_t>(key, v);
  } else if (key == "run.interpolate") {
    interpolate = v == "auto" ? v : (parse_bool(key, v) ? "true" : "false");
  } else if (key == "run.lift") {
    lift = v;
  } else if (key == "run.augmented") {
    augmented = parse_bool(key, v);
  } else if (key == "battery.alpha") {
    battery.alpha = real();
  } else if (key == "battery.eta") {
    battery.eta = real();
  } else if (key == "battery.u_min") {
    battery.u_min = real();
  } else if (key == "battery.u_max") {
    battery.u_max = real();
  } else if (key == "battery.e_min") {
    battery.e_min = real();
  } else if (key == "battery.e_max") {
    battery.e_max = real();
  } else if (key == "battery.dt") {
    battery.dt = real();
  } else if (key == "battery.e0") {
    battery.e0 = real();
  } else if (key == "tariff.T") {
    tariff.T = integer();
  } else if (key == "tariff.t_on") {
    tariff.t_on = integer();
  } else if (key == "tariff.t_off") {
    tariff.t_off = integer();
  } else if (key == "tariff.p_on") {
    tariff.p_on = real();
  } else if (key == "tariff.p_off") {
    tariff.p_off = real();
  } else if (key == "tariff.p_d") {
    tariff.p_d = real();
  } else if (key == "data.loads") {
    loads = v;
  } else if (key == "data.weather") {
    weather = v;
  } else if (key == "data.solar_states") {
    solar_states = size();
  } else if (key == "data.kw_per_unit") {
    kw_per_unit = real();
  } else if (key == "data.noise_scale") {
    noise_scale = real();
  } else if (key == "data.fit_vars") {
    fit_vars = v;
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (!fixtures::is_builtin(problem)) throw ConfigError("unknown problem '" + problem + "'");
  for (std::size_t v : k_list) {
    if (v < 1) throw ConfigError("k_list entries must be positive");
  }
  if (k_solar < 1 || nodes < 1 || paths < 1) throw ConfigError("k_solar, nodes and paths must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (lift != "nearest" && lift != "lookahead") throw ConfigError("lift must be nearest or lookahead");
  if (interpolate != "auto" && interpolate != "true" && interpolate != "false") {
    throw ConfigError("interpolate must be auto, true or false");
  }
  if (solar_states != 1 && solar_states != 3) throw ConfigError("solar_states must be 1 or 3");
  if (!(kw_per_unit > 0.0)) throw ConfigError("kw_per_unit must be positive");
  if (!(noise_scale >= 0.0)) throw ConfigError("noise_scale must be nonnegative");
  if (threads < 1) throw ConfigError("threads must be positive");
  try {
    battery.validate();
    tariff.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::size_t RunConfig::grid_k() const {
  if (k > 0) return k;
  if (problem == "counterexample1") return 3;
  if (problem == "counterexample2") return 11;
  if (problem == "duan") return 200;
  if (problem == "battery-stoch") return 10;
  return 20;
}

bool RunConfig::use_interpolation() const {
  if (interpolate != "auto") return interpolate == "true";
  return problem == "duan" || problem == "battery-det" || problem == "battery-stoch";
}

std::string RunConfig::to_text() const {
  std::ostringstream s;
  std::vector<std::string> ks;
  for (std::size_t v : k_list) ks.push_back(std::to_string(v));
  std::string klist;
  for (std::size_t i = 0; i < ks.size(); ++i) klist += (i ? "," : "") + ks[i];
  s << "[run]\n"
    << "problem = " << problem << '\n'
    << "k = " << grid_k() << '\n';
  if (!klist.empty()) s << "k_list = " << klist << '\n';
  s << "k_solar = " << k_solar << '\n'
    << "nodes = " << nodes << '\n'
    << "epsilon = " << num(epsilon) << '\n'
    << "paths = " << paths << '\n'
    << "seed = " << seed << '\n'
    << "interpolate = " << (use_interpolation() ? "true" : "false") << '\n'
    << "lift = " << lift << '\n'
    << "augmented = " << (augmented ? "true" : "false") << '\n'
    << "\n[battery]\n"
    << "alpha = " << num(battery.alpha) << '\n'
    << "eta = " << num(battery.eta) << '\n'
    << "u_min = " << num(battery.u_min) << '\n'
    << "u_max = " << num(battery.u_max) << '\n'
    << "e_min = " << num(battery.e_min) << '\n'
    << "e_max = " << num(battery.e_max) << '\n'
    << "dt = " << num(battery.dt) << '\n'
    << "e0 = " << num(battery.e0) << '\n'
    << "\n[tariff]\n"
    << "T = " << tariff.T << '\n'
    << "t_on = " << tariff.t_on << '\n'
    << "t_off = " << tariff.t_off << '\n'
    << "p_on = " << num(tariff.p_on) << '\n'
    << "p_off = " << num(tariff.p_off) << '\n'
    << "p_d = " << num(tariff.p_d) << '\n'
    << "\n[data]\n"
    << "loads = " << loads << '\n'
    << "weather = " << weather << '\n'
    << "solar_states = " << solar_states << '\n'
    << "kw_per_unit = " << num(kw_per_unit) << '\n'
    << "noise_scale = " << num(noise_scale) << '\n'
    << "fit_vars = " << fit_vars << '\n';
  return s.str();
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line, section = "run";
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(section + "." + key, trim(t.substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

/// Key-value results of a command, in insertion order.
using Results = std::vector<std::pair<std::string, std::string>>;

struct Context {
  RunConfig cfg;
  fs::path out;
  std::string command;
  /// Pipeline step currently running, named in solver errors.
  std::string stage = "setup";
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::ofstream open_file(const Context& ctx, const std::string& name) {
  std::ofstream f(ctx.out / name);
  if (!f) throw Error("cannot write " + (ctx.out / name).string());
  return f;
}

void write_summary(const Context& ctx, const Results& results) {
  auto f = open_file(ctx, "summary.ini");
  if (ctx.cfg.timestamp) {
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    f << timestamp_line() << '\n' << "# runtime_seconds = " << num(secs) << '\n';
  }
  f << "# fsdp " << ctx.command << '\n' << ctx.cfg.to_text() << "\n[result]\n";
  for (const auto& [k, v] : results) f << k << " = " << v << '\n';
  std::cout << "fsdp " << ctx.command << " " << ctx.cfg.problem << '\n';
  for (const auto& [k, v] : results) std::cout << "  " << k << " = " << v << '\n';
  std::cout << "  output = " << ctx.out.string() << '\n';
}

std::string grid_sizes(const std::vector<TensorGrid>& grids) {
  std::string out;
  for (std::size_t i = 0; i < grids.size(); ++i) out += (i ? "," : "") + std::to_string(grids[i].size());
  return out;
}

std::string inputs_text(const Trajectory& tr) {
  Vec u;
  for (const Vec& v : tr.inputs) u.insert(u.end(), v.begin(), v.end());
  return join(u);
}

LiftOptions lift_options(const RunConfig& cfg) {
  LiftOptions o;
  o.mode = cfg.lift == "nearest" ? LiftMode::kNearest : LiftMode::kLookahead;
  return o;
}

battery::GridSettings grid_settings(const RunConfig& cfg, std::size_t k) {
  battery::GridSettings g;
  g.k_energy = g.k_input = g.k_demand = k;
  g.k_solar = cfg.k_solar;
  g.quadrature_nodes = cfg.nodes;
  g.epsilon = cfg.epsilon;
  g.interpolate = cfg.use_interpolation();
  g.lift = lift_options(cfg).mode;
  g.threads = cfg.threads;
  g.seed = cfg.seed;
  return g;
}

battery::LoadProfile load_profile(const RunConfig& cfg) {
  auto loads = cfg.loads.empty() ? fixtures::synthetic_day() : battery::read_load_csv(cfg.loads);
  if (loads.q_a.size() != static_cast<std::size_t>(cfg.tariff.T) + 1) {
    throw ConfigError("load profile has " + std::to_string(loads.q_a.size()) + " stages but the tariff needs " +
                      std::to_string(cfg.tariff.T + 1));
  }
  return loads;
}

solar::GaussMarkovModel solar_model(const RunConfig& cfg) {
  solar::WeatherSeries w = cfg.weather.empty() ? fixtures::tempe_weather() : solar::read_weather_csv(cfg.weather);
  std::vector<std::size_t> vars{0};
  if (cfg.solar_states == 3) vars = {0, 1, 2};
  solar::GaussMarkovModel m = solar::fit(solar::normalize(w), vars);
  m.B *= cfg.noise_scale;
  return m;
}

/// Discretize, solve, extract and lift an additive problem, recording each
/// step in ctx.stage.
struct AdditiveRun {
  DiscreteProblem disc;
  ValueTable table;
  TabularPolicy tab;
  FeedbackPolicy policy;
  Trajectory rollout;
  double seconds = 0.0;
  double discrete_optimum = 0.0;
};

std::unique_ptr<AdditiveRun> run_additive(Context& ctx, const ProblemSpec& spec, StageGrids grids,
                                          const SolveOptions& so) {
  auto r = std::make_unique<AdditiveRun>();
  ctx.stage = "discretize";
  r->disc = discretize(spec, std::move(grids));
  ctx.stage = "bellman";
  auto t = std::chrono::steady_clock::now();
  r->table = solve_bellman(r->disc, so);
  r->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
  const TensorGrid& g0 = r->table.grid(spec.t0);
  r->discrete_optimum = r->table.layer(spec.t0)[g0.nearest(spec.x0)];
  ctx.stage = "lift";
  r->tab = extract_policy(r->table);
  r->policy = lift_policy(r->tab, r->disc.spec, lift_options(ctx.cfg), &r->table);
  ctx.stage = "rollout";
  r->rollout = rollout_deterministic(r->disc.spec, r->policy);
  return r;
}

void write_tables(const Context& ctx, const ValueTable& vt, const TabularPolicy& tab) {
  write_value_table_json(vt, (ctx.out / "value_table.json").string());
  write_policy_json(tab, (ctx.out / "policy.json").string());
}

SolveOptions solve_options(const RunConfig& cfg, EmptySetPolicy empty = EmptySetPolicy::kThrow) {
  SolveOptions so;
  so.interpolate = cfg.use_interpolation();
  so.threads = cfg.threads;
  so.on_empty = empty;
  return so;
}

// ---------------------------------------------------------------- solve

Results solve_counterexample1(Context& ctx, std::size_t k) {
  ctx.stage = "augment";
  AugmentedSpec aug = fixtures::counterexample1_augmented();
  auto grids = make_stage_grids(aug.spec.state_boxes, aug.spec.t0, aug.spec.input_box, {k}, {3});
  auto r = run_additive(ctx, aug.spec, grids, solve_options(ctx.cfg));
  ctx.stage = "output";
  write_tables(ctx, r->table, r->tab);
  write_trajectory_csv(r->rollout, (ctx.out / "trajectory.csv").string(), {"x", "z"});
  return {{"optimum", num(r->rollout.objective_value)},
          {"discrete_optimum", num(r->discrete_optimum)},
          {"inputs", inputs_text(r->rollout)},
          {"state_grid_sizes", grid_sizes(r->table.grids)},
          {"input_grid_size", std::to_string(r->table.inputs.size())}};
}

Results solve_duan(Context& ctx, std::size_t k) {
  ctx.stage = "augment";
  AugmentedSpec aug = fixtures::duan_augmented();
  PipelineOptions po = fixtures::duan_pipeline_options(k, ctx.cfg.threads);
  po.solve.interpolate = ctx.cfg.use_interpolation();
  po.lift = lift_options(ctx.cfg);
  auto grids = make_stage_grids(aug.spec.state_boxes, aug.spec.t0, aug.spec.input_box, po.k_state, po.k_input);
  auto r = run_additive(ctx, aug.spec, grids, po.solve);
  ctx.stage = "output";
  write_tables(ctx, r->table, r->tab);
  write_trajectory_csv(r->rollout, (ctx.out / "trajectory.csv").string(), {"x", "w1", "w2"});
  const double J = r->rollout.objective_value;
  return {{"optimum", num(J)},
          {"discrete_optimum", num(r->discrete_optimum)},
          {"reference", num(fixtures::kDuanOptimum)},
          {"gap", num(J - fixtures::kDuanOptimum)},
          {"inputs", inputs_text(r->rollout)},
          {"reference_inputs", join(fixtures::kDuanInputs)},
          {"input_spacing", num(r->table.inputs.axis(0).spacing())},
          {"state_grid_sizes", grid_sizes(r->table.grids)},
          {"input_grid_size", std::to_string(r->table.inputs.size())}};
}

bool energy_box_respected(const Trajectory& tr, const battery::BatteryParams& p) {
  for (const Vec& x : tr.states) {
    if (!(x[0] >= p.e_min && x[0] <= p.e_max)) return false;
  }
  return true;
}

Results battery_det_results(const RunConfig& cfg, const battery::DeterministicSolution& sol,
                            const battery::LoadProfile& loads) {
  const Trajectory& tr = sol.rollout;
  auto cost = battery::day_cost(tr, cfg.battery, cfg.tariff, loads);
  auto idle = battery::idle_trajectory(cfg.battery, cfg.tariff);
  auto idle_cost = battery::day_cost(idle, cfg.battery, cfg.tariff, loads);
  return {{"objective", num(tr.objective_value)},
          {"energy_cost", num(cost.energy)},
          {"demand_cost", num(cost.demand)},
          {"monthly_cost", num(30.0 * tr.objective_value)},
          {"peak_kw", num(battery::demand_peak(tr, cfg.tariff, loads))},
          {"augmented_peak_kw", num(tr.states.back()[1])},
          {"on_peak_std_kw", num(battery::on_peak_std(tr, cfg.tariff, loads))},
          {"idle_objective", num(idle_cost.total())},
          {"idle_peak_kw", num(battery::demand_peak(idle, cfg.tariff, loads))},
          {"idle_on_peak_std_kw", num(battery::on_peak_std(idle, cfg.tariff, loads))},
          {"energy_box_respected", energy_box_respected(tr, cfg.battery) ? "true" : "false"},
          {"state_grid_sizes", grid_sizes(sol.table.grids)},
          {"input_grid_size", std::to_string(sol.table.inputs.size())}};
}

Results solve_battery_det(Context& ctx, std::size_t k) {
  ctx.stage = "load data";
  auto loads = load_profile(ctx.cfg);
  ctx.stage = "battery pipeline (augment, discretize, bellman, lift, rollout)";
  auto sol = battery::solve_deterministic(ctx.cfg.battery, ctx.cfg.tariff, loads, grid_settings(ctx.cfg, k));
  ctx.stage = "output";
  write_tables(ctx, sol->table, sol->tabular);
  write_trajectory_csv(sol->rollout, (ctx.out / "trajectory.csv").string(), {"e", "z"});
  battery::write_results_csv(sol->rollout, ctx.cfg.battery, ctx.cfg.tariff, loads, (ctx.out / "results.csv").string());
  return battery_det_results(ctx.cfg, *sol, loads);
}

Results solve_battery_stoch(Context& ctx, std::size_t k) {
  ctx.stage = "load data";
  auto loads = load_profile(ctx.cfg);
  ctx.stage = "fit solar model";
  auto model = solar_model(ctx.cfg);
  ctx.stage = "stochastic battery pipeline (augment, cover, discretize, bellman, lift)";
  auto sol = battery::solve_stochastic(ctx.cfg.battery, ctx.cfg.tariff, loads.q_a, model, ctx.cfg.kw_per_unit,
                                       grid_settings(ctx.cfg, k));
  ctx.stage = "monte carlo";
  MonteCarloOptions mo;
  mo.threads = ctx.cfg.threads;
  auto mc = expected_cost_monte_carlo(sol->augmented, sol->policy, sol->augmented.x0, ctx.cfg.paths, ctx.cfg.seed, mo);
  ctx.stage = "output";
  write_tables(ctx, sol->table, sol->tabular);
  const TensorGrid& g0 = sol->table.grid(0);
  return {{"discrete_optimum", num(sol->table.layer(0)[g0.nearest(sol->augmented.x0)])},
          {"expected_cost", num(mc.mean)},
          {"std_error", num(mc.std_error)},
          {"paths", std::to_string(mc.samples)},
          {"failures", std::to_string(mc.failures)},
          {"cover_multiplier", num(sol->discrete.cover.multiplier)},
          {"cover_escape", num(sol->discrete.cover.achieved_escape)},
          {"state_grid_sizes", grid_sizes(sol->table.grids)},
          {"input_grid_size", std::to_string(sol->table.inputs.size())}};
}

/// Uniform law on [0, 1] as k equal-weight midpoints.
QuadratureRule uniform_rule(std::size_t k) {
  std::vector<Vec> nodes;
  for (std::size_t i = 0; i < k; ++i) nodes.push_back({(static_cast<double>(i) + 0.5) / static_cast<double>(k)});
  return QuadratureRule::from_nodes(std::move(nodes), Vec(k, 1.0));
}

Results solve_counterexample2(Context& ctx, std::size_t k) {
  ctx.stage = "representation";
  StochasticSpec spec = fixtures::counterexample2();
  ctx.stage = "cover";
  CompactCover cover = build_compact_cover(spec, ctx.cfg.epsilon);
  ctx.stage = "discretize";
  auto disc = discretize_stochastic(spec, cover, {k}, {2}, uniform_rule(k));
  ctx.stage = "bellman";
  ValueTable vt = solve_bellman_stochastic(disc, solve_options(ctx.cfg));
  TabularPolicy tab = extract_policy(vt);
  ctx.stage = "monte carlo";
  MonteCarloOptions mo;
  mo.sampler = fixtures::counterexample2_sampler();
  mo.threads = ctx.cfg.threads;
  FeedbackPolicy pi = fixtures::counterexample2_policy();
  auto from_start = expected_cost_monte_carlo(spec, pi, Vec{0.0}, ctx.cfg.paths, ctx.cfg.seed, mo);
  mo.start = 1;
  auto from_one = expected_cost_monte_carlo(spec, pi, Vec{1.0}, ctx.cfg.paths, ctx.cfg.seed, mo);
  ctx.stage = "output";
  write_tables(ctx, vt, tab);
  const TensorGrid& g1 = vt.grid(1);
  return {{"discrete_optimum", num(vt.layer(0)[0])},
          {"policy_cost_from_0_0", num(from_start.mean)},
          {"policy_std_error_from_0_0", num(from_start.std_error)},
          {"policy_cost_from_1_1", num(from_one.mean)},
          {"optimum_from_1_1", num(vt.layer(1)[g1.nearest(Vec{1.0})])},
          {"paths", std::to_string(from_start.samples)}};
}

Results cmd_solve(Context& ctx) {
  const std::size_t k = ctx.cfg.grid_k();
  const std::string& p = ctx.cfg.problem;
  if (p == "counterexample1") return solve_counterexample1(ctx, k);
  if (p == "counterexample2") return solve_counterexample2(ctx, k);
  if (p == "duan") return solve_duan(ctx, k);
  if (p == "battery-det") return solve_battery_det(ctx, k);
  return solve_battery_stoch(ctx, k);
}

// ---------------------------------------------------------------- sweep

Results cmd_sweep(Context& ctx) {
  RunConfig& cfg = ctx.cfg;
  std::vector<std::size_t> ks = cfg.k_list;
  if (ks.empty()) {
    if (cfg.problem == "duan") {
      ks = {10, 50, 200};
    } else if (cfg.problem == "counterexample1") {
      ks = {2, 3, 5, 9};
    } else if (cfg.problem == "battery-det") {
      ks = {5, 10, 20, 40};
    } else {
      throw ConfigError("sweep supports counterexample1, duan and battery-det");
    }
    cfg.k_list = ks;
  }
  auto f = open_file(ctx, "sweep.csv");
  f << "k,objective,discrete_optimum,gap,peak_kw,monthly_cost,seconds\n";
  Results out;
  for (std::size_t k : ks) {
    ctx.stage = "sweep k=" + std::to_string(k);
    double objective = 0.0, discrete = 0.0, seconds = 0.0;
    std::string gap, peak, monthly;
    if (cfg.problem == "battery-det") {
      auto loads = load_profile(cfg);
      auto sol = battery::solve_deterministic(cfg.battery, cfg.tariff, loads, grid_settings(cfg, k));
      objective = sol->rollout.objective_value;
      discrete = sol->table.layer(0)[sol->table.grid(0).nearest(sol->augmented.spec.x0)];
      seconds = sol->solve_seconds;
      peak = num(battery::demand_peak(sol->rollout, cfg.tariff, loads));
      monthly = num(30.0 * objective);
    } else {
      AugmentedSpec aug = cfg.problem == "duan" ? fixtures::duan_augmented() : fixtures::counterexample1_augmented();
      const double reference = cfg.problem == "duan" ? fixtures::kDuanOptimum : -1.5;
      std::size_t k_input = cfg.problem == "duan" ? k : 3;
      SolveOptions so =
          solve_options(cfg, cfg.problem == "duan" ? EmptySetPolicy::kPrune : EmptySetPolicy::kThrow);
      auto grids = make_stage_grids(aug.spec.state_boxes, aug.spec.t0, aug.spec.input_box, {k}, {k_input});
      auto r = run_additive(ctx, aug.spec, grids, so);
      objective = r->rollout.objective_value;
      discrete = r->discrete_optimum;
      seconds = r->seconds;
      gap = num(std::abs(objective - reference));
    }
    f << k << ',' << num(objective) << ',' << num(discrete) << ',' << gap << ',' << peak << ',' << monthly << ','
      << num(seconds) << '\n';
    out.emplace_back("objective_k" + std::to_string(k), num(objective));
  }
  return out;
}

// ---------------------------------------------------------------- simulate

Results cmd_simulate(Context& ctx) {
  RunConfig& cfg = ctx.cfg;
  if (cfg.problem == "counterexample2") {
    StochasticSpec spec = fixtures::counterexample2();
    MonteCarloOptions mo;
    mo.sampler = fixtures::counterexample2_sampler();
    FeedbackPolicy pi = fixtures::counterexample2_policy();
    auto f = open_file(ctx, "paths.csv");
    f << "path,cost,x1\n";
    for (std::size_t i = 0; i < cfg.paths; ++i) {
      auto v = sample_disturbances(spec, cfg.seed, i, 0, mo.sampler);
      Trajectory tr = trajectory_map(spec, pi, spec.x0, v);
      f << i << ',' << num(tr.objective_value) << ',' << num(tr.states[1][0]) << '\n';
    }
    auto mc = expected_cost_monte_carlo(spec, pi, spec.x0, cfg.paths, cfg.seed, mo);
    return {{"mean_cost", num(mc.mean)}, {"std_error", num(mc.std_error)}, {"paths", std::to_string(mc.samples)}};
  }
  if (cfg.problem != "battery-stoch") throw ConfigError("simulate supports battery-stoch and counterexample2");
  ctx.stage = "load data";
  auto loads = load_profile(cfg);
  ctx.stage = "fit solar model";
  auto model = solar_model(cfg);
  ctx.stage = "stochastic battery pipeline (augment, cover, discretize, bellman, lift)";
  auto sol = battery::solve_stochastic(cfg.battery, cfg.tariff, loads.q_a, model, cfg.kw_per_unit,
                                       grid_settings(cfg, cfg.grid_k()));
  ctx.stage = "simulate";
  auto f = open_file(ctx, "paths.csv");
  f << "path,cost,energy_cost,demand_cost,peak_kw,idle_peak_kw\n";
  const auto idle = battery::idle_trajectory(cfg.battery, cfg.tariff);
  double cost_sum = 0.0, cost_sq = 0.0, peak_sum = 0.0, peak_sq = 0.0, idle_sum = 0.0;
  std::size_t failures = 0, done = 0;
  for (std::size_t i = 0; i < cfg.paths; ++i) {
    battery::SimulatedDay day;
    try {
      day = battery::simulate_day(*sol, loads.q_a, model, cfg.kw_per_unit, cfg.tariff, cfg.seed, i);
    } catch (const Error&) {
      ++failures;
      f << i << ",failed,,,,\n";
      continue;
    }
    auto dc = battery::day_cost(day.trajectory, cfg.battery, cfg.tariff, day.loads);
    double idle_peak = battery::demand_peak(idle, cfg.tariff, day.loads);
    f << i << ',' << num(day.cost) << ',' << num(dc.energy) << ',' << num(dc.demand) << ',' << num(day.peak) << ','
      << num(idle_peak) << '\n';
    if (i == 0) {
      battery::write_results_csv(day.trajectory, cfg.battery, cfg.tariff, day.loads,
                                 (ctx.out / "results.csv").string());
      write_trajectory_csv(day.trajectory, (ctx.out / "trajectory.csv").string(), {"e", "w", "z"});
    }
    ++done;
    cost_sum += day.cost;
    cost_sq += day.cost * day.cost;
    peak_sum += day.peak;
    peak_sq += day.peak * day.peak;
    idle_sum += idle_peak;
  }
  auto stderr_of = [&](double sum, double sq) {
    if (done < 2) return 0.0;
    double n = static_cast<double>(done), mean = sum / n;
    return std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1.0)) / n);
  };
  const double n = static_cast<double>(std::max<std::size_t>(done, 1));
  return {{"mean_cost", num(cost_sum / n)},
          {"cost_std_error", num(stderr_of(cost_sum, cost_sq))},
          {"mean_peak_kw", num(peak_sum / n)},
          {"peak_std_error", num(stderr_of(peak_sum, peak_sq))},
          {"mean_idle_peak_kw", num(idle_sum / n)},
          {"paths", std::to_string(done)},
          {"failures", std::to_string(failures)}};
}

// ---------------------------------------------------------------- fit-solar

std::string matrix_text(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Vec row;
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out += (i ? "; " : "") + join(row, " ");
  }
  return out;
}

Results cmd_fit_solar(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  ctx.stage = "read weather";
  solar::WeatherSeries w = cfg.weather.empty() ? fixtures::tempe_weather() : solar::read_weather_csv(cfg.weather);
  std::vector<std::size_t> vars;
  for (const std::string& name : split_list(cfg.fit_vars)) {
    auto it = std::find(w.names.begin(), w.names.end(), name);
    if (it == w.names.end()) throw ConfigError("weather data has no variable '" + name + "'");
    vars.push_back(static_cast<std::size_t>(it - w.names.begin()));
  }
  if (vars.empty()) throw ConfigError("fit_vars is empty");
  ctx.stage = "normalize";
  auto data = solar::normalize(w);
  ctx.stage = "fit";
  auto corr = solar::correlations(data, vars);
  auto model = solar::fit(data, vars);
  ctx.stage = "output";
  solar::write_model_json(model, (ctx.out / "model.json").string());
  auto path = solar::generate(model, static_cast<int>(w.length()) - 1, cfg.seed);
  solar::write_path_csv(path, model.names, (ctx.out / "generated_path.csv").string());
  return {{"variables", cfg.fit_vars},
          {"M0", matrix_text(corr.M0)},
          {"M1", matrix_text(corr.M1)},
          {"A", matrix_text(model.A)},
          {"B", matrix_text(model.B)}};
}

// ---------------------------------------------------------------- verify

Results cmd_verify(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::size_t k = cfg.grid_k();
  ProblemSpec spec;
  StageGrids grids;
  ctx.stage = "representation";
  if (cfg.problem == "counterexample1") {
    if (cfg.augmented) {
      ctx.stage = "augment";
      AugmentedSpec aug = fixtures::counterexample1_augmented();
      spec = aug.spec;
      grids = make_stage_grids(spec.state_boxes, spec.t0, spec.input_box, {k}, {3});
    } else {
      spec = fixtures::counterexample1();
      grids = input_only_grids(spec, TensorGrid(spec.input_box, {3}));
    }
  } else if (cfg.problem == "duan") {
    if (cfg.augmented) {
      ctx.stage = "augment";
      spec = fixtures::duan_augmented().spec;
      grids = make_stage_grids(spec.state_boxes, spec.t0, spec.input_box, {k}, {k});
    } else {
      spec = fixtures::duan();
      grids = input_only_grids(spec, TensorGrid(spec.input_box, {k}));
    }
  } else if (cfg.problem == "battery-det") {
    ctx.stage = "load data";
    spec = battery::build_deterministic_problem(cfg.battery, cfg.tariff, load_profile(cfg));
    grids = input_only_grids(spec, TensorGrid(spec.input_box, {k}));
  } else {
    throw ConfigError("verify supports deterministic problems: counterexample1, duan, battery-det");
  }
  ctx.stage = "enumerate";
  PrincipleReport report = verify_principle_violation(spec, grids);
  ctx.stage = "output";
  auto f = open_file(ctx, "violations.csv");
  f << "stage,state,tail_value,sub_optimum,tail_inputs,sub_inputs\n";
  for (const auto& v : report.violations) {
    Vec tail, sub;
    for (const Vec& u : v.tail_inputs) tail.insert(tail.end(), u.begin(), u.end());
    for (const Vec& u : v.sub_inputs) sub.insert(sub.end(), u.begin(), u.end());
    f << v.stage << ',' << join(v.state, " ") << ',' << num(v.tail_value) << ',' << num(v.sub_optimum) << ','
      << join(tail, " ") << ',' << join(sub, " ") << '\n';
  }
  return {{"optimum", num(report.optimum.optimal_value)},
          {"optimal_inputs", inputs_text(report.optimum.best)},
          {"feasible_sequences", std::to_string(report.optimum.feasible_sequences)},
          {"violations", std::to_string(report.violations.size())}};
}

void apply_all(RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& entries) {
  for (const auto& [key, value] : entries) {
    if (key.rfind("result.", 0) == 0) continue;
    cfg.set(key, value);
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Finite horizon dynamic programming with forward separable objectives"};
  app.require_subcommand(1);
  std::string problem, config_path;
  std::map<std::string, std::string> flags;
  bool no_timestamp = false, augmented = false;
  std::string out_dir;
  unsigned threads = 1;

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const std::vector<Flag> table{
      {"--k", "run.k", "grid points per coordinate"},
      {"--k-list", "run.k_list", "comma separated grid sizes for sweep"},
      {"--k-solar", "run.k_solar", "grid points per solar coordinate"},
      {"--nodes", "run.nodes", "quadrature nodes per disturbance coordinate"},
      {"--epsilon", "run.epsilon", "per-stage escape tolerance of the compact cover"},
      {"--paths", "run.paths", "Monte-Carlo paths"},
      {"--seed", "run.seed", "random seed"},
      {"--interpolate", "run.interpolate", "auto, true or false"},
      {"--lift", "run.lift", "nearest or lookahead"},
      {"--loads", "data.loads", "load CSV (stage, load_kw, solar_kw)"},
      {"--weather", "data.weather", "weather CSV (day, stage, variables...)"},
      {"--solar-states", "data.solar_states", "solar model dimension, 1 or 3"},
      {"--noise-scale", "data.noise_scale", "factor applied to the solar model B"},
      {"--vars", "data.fit_vars", "comma separated weather variables to fit"},
  };
  std::vector<CLI::App*> subs;
  for (const char* name : {"solve", "sweep", "simulate", "fit-solar", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--problem", problem, "builtin problem name or config file");
    sub->add_option("--config", config_path, "config file");
    sub->add_option("--out", out_dir, "output directory (default $FSDP_OUT_DIR or ./fsdp_out)");
    sub->add_option("--threads", threads, "solver threads");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp and runtime header lines");
    sub->add_flag("--augmented", augmented, "verify the augmented problem");
    for (const Flag& fl : table) {
      sub->add_option_function<std::string>(fl.name, [&flags, key = fl.key](const std::string& v) { flags[key] = v; },
                                            fl.help);
    }
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Context ctx;
  for (CLI::App* sub : subs) {
    if (sub->parsed()) ctx.command = sub->get_name();
  }
  try {
    if (!config_path.empty()) apply_all(ctx.cfg, parse_config_file(config_path));
    if (!problem.empty()) {
      if (fixtures::is_builtin(problem)) {
        ctx.cfg.problem = problem;
      } else if (fs::exists(problem)) {
        apply_all(ctx.cfg, parse_config_file(problem));
      } else {
        throw ConfigError("unknown problem '" + problem + "' (builtins: counterexample1, counterexample2, duan, "
                          "battery-det, battery-stoch)");
      }
    }
    for (const auto& [key, value] : flags) ctx.cfg.set(key, value);
    if (augmented) ctx.cfg.augmented = true;
    ctx.cfg.threads = threads;
    ctx.cfg.timestamp = !no_timestamp;
    if (out_dir.empty()) {
      const char* env = std::getenv("FSDP_OUT_DIR");
      out_dir = env && *env ? env : "fsdp_out";
    }
    ctx.cfg.validate();
    ctx.out = out_dir;
    fs::create_directories(ctx.out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    Results results;
    if (ctx.command == "solve") {
      results = cmd_solve(ctx);
    } else if (ctx.command == "sweep") {
      results = cmd_sweep(ctx);
    } else if (ctx.command == "simulate") {
      results = cmd_simulate(ctx);
    } else if (ctx.command == "fit-solar") {
      results = cmd_fit_solar(ctx);
    } else {
      results = cmd_verify(ctx);
    }
    write_summary(ctx, results);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error during " << ctx.stage << ": " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace fsdp::cli
