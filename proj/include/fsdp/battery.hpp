#pragma once

#include <memory>
#include <string>

#include "fsdp/augment.hpp"
#include "fsdp/bellman.hpp"
#include "fsdp/solar.hpp"
#include "fsdp/stochastic.hpp"

namespace fsdp::battery {

/// Battery constants. Energy in Wh, charge rate in W, step length in hours.
struct BatteryParams {
  double alpha = 0.999791667;
  double eta = 0.92;
  double u_max = 4000.0;
  double u_min = -4000.0;
  double e_max = 8000.0;
  double e_min = 0.0;
  double dt = 0.5;
  /// Energy at stage 0.
  double e0 = 0.0;

  /// u_min <= 0 <= u_max is accepted so that a disabled battery
  /// (u_min = u_max = 0) can be expressed.
  void validate() const;
};

/// Time-of-use energy prices ($/kWh) and the demand price ($/kW) charged on
/// the maximum grid power over the on-peak window [t_on, t_off).
struct TariffSchedule {
  int T = 48;
  int t_on = 27;
  int t_off = 41;
  double p_on = 0.0633e-3;
  double p_off = 0.0423e-3;
  double p_d = 0.2973;

  bool on_peak(int k) const { return k >= t_on && k < t_off; }
  double price(int k) const { return on_peak(k) ? p_on : p_off; }
  void validate() const;
};

/// Appliance load q_a and solar generation q_s in kW, one value per stage
/// 0..T.
struct LoadProfile {
  Vec q_a;
  Vec q_s;

  void validate(int T) const;
};

/// Reads columns stage, load_kw, solar_kw.
LoadProfile read_load_csv(const std::string& path);

/// e' = alpha (e + eta u dt).
double battery_step(double e, double u, const BatteryParams& params);

/// Grid power in kW for load and solar in kW and charge rate u in W.
inline double grid_power(double q_a, double q_s, double u) { return q_a - q_s + u / 1000.0; }

/// State e, input u. The objective is the sum of the energy cost
/// sum_k p_k q(k) dt (the stage T term uses u = 0) and p_d times the
/// running maximum of max(0, q(k)) over on-peak stages.
ProblemSpec build_deterministic_problem(const BatteryParams& params, const TariffSchedule& tariff,
                                        const LoadProfile& loads);

/// State (e, w) with w the normalized solar deviation of `model`; solar
/// power at stage k is power_at(model, 0, k, w_0, kw_per_unit).
StochasticSpec build_stochastic_problem(const BatteryParams& params, const TariffSchedule& tariff, const Vec& q_a,
                                        const solar::GaussMarkovModel& model, double kw_per_unit);

/// Bounds of the carried peak entering each stage: {0} up to and including
/// t_on and [0, max q_a + u_max / 1000] afterwards.
std::vector<Box> demand_bounds(const BatteryParams& params, const TariffSchedule& tariff, const Vec& q_a);

/// Maximum of max(0, q(k)) over on-peak stages of the rollout (0 for an
/// empty window). `inputs[k][0]` is the charge rate at stage k.
double demand_peak(const Trajectory& tr, const TariffSchedule& tariff, const LoadProfile& loads);

struct DayCost {
  double energy = 0.0;
  double demand = 0.0;
  double total() const { return energy + demand; }
};

DayCost day_cost(const Trajectory& tr, const BatteryParams& params, const TariffSchedule& tariff,
                 const LoadProfile& loads);

/// Trajectory with the battery idle (u = 0 at every stage).
Trajectory idle_trajectory(const BatteryParams& params, const TariffSchedule& tariff);

/// Population standard deviation of grid power over on-peak stages.
double on_peak_std(const Trajectory& tr, const TariffSchedule& tariff, const LoadProfile& loads);

/// Per-stage series: stage, hour, solar_kw, load_kw, battery_kw, grid_kw,
/// energy_wh.
void write_results_csv(const Trajectory& tr, const BatteryParams& params, const TariffSchedule& tariff,
                       const LoadProfile& loads, const std::string& path, const std::string& header_line = "");

struct GridSettings {
  std::size_t k_energy = 20;
  std::size_t k_input = 20;
  std::size_t k_demand = 20;
  /// Stochastic only: grid points per solar coordinate and Gauss-Hermite
  /// nodes per disturbance coordinate.
  std::size_t k_solar = 7;
  std::size_t quadrature_nodes = 5;
  double epsilon = 1e-3;
  bool interpolate = true;
  LiftMode lift = LiftMode::kLookahead;
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

/// Solved deterministic battery problem. The lifted policy refers to the
/// other members, so the object is not copyable or movable.
struct DeterministicSolution {
  AugmentedSpec augmented;
  DiscreteProblem discrete;
  ValueTable table;
  TabularPolicy tabular;
  FeedbackPolicy policy;
  /// Continuous rollout of the lifted policy over (e, z).
  Trajectory rollout;
  double solve_seconds = 0.0;

  DeterministicSolution() = default;
  DeterministicSolution(const DeterministicSolution&) = delete;
  DeterministicSolution& operator=(const DeterministicSolution&) = delete;
};

std::unique_ptr<DeterministicSolution> solve_deterministic(const BatteryParams& params, const TariffSchedule& tariff,
                                                           const LoadProfile& loads, const GridSettings& grid);

struct StochasticSolution {
  StochasticSpec base;
  StochasticSpec augmented;
  DiscreteStochasticProblem discrete;
  ValueTable table;
  TabularPolicy tabular;
  FeedbackPolicy policy;
  double solve_seconds = 0.0;

  StochasticSolution() = default;
  StochasticSolution(const StochasticSolution&) = delete;
  StochasticSolution& operator=(const StochasticSolution&) = delete;
};

std::unique_ptr<StochasticSolution> solve_stochastic(const BatteryParams& params, const TariffSchedule& tariff,
                                                     const Vec& q_a, const solar::GaussMarkovModel& model,
                                                     double kw_per_unit, const GridSettings& grid);

/// One simulated day under the stochastic policy.
struct SimulatedDay {
  /// Trajectory over (e, w, z).
  Trajectory trajectory;
  /// Loads with the realized solar power.
  LoadProfile loads;
  double cost = 0.0;
  double peak = 0.0;
};

SimulatedDay simulate_day(const StochasticSolution& sol, const Vec& q_a, const solar::GaussMarkovModel& model,
                          double kw_per_unit, const TariffSchedule& tariff, std::uint64_t seed, std::uint64_t path);

/// Trajectory restricted to the energy coordinate.
Trajectory energy_trajectory(const Trajectory& tr);

}  // namespace fsdp::battery
