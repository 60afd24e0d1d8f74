#pragma once

#include <string>

#include "fsdp/augment.hpp"
#include "fsdp/battery.hpp"
#include "fsdp/bellman.hpp"
#include "fsdp/stochastic.hpp"

namespace fsdp::fixtures {

/// Names accepted by the command line `--problem` option.
const std::vector<std::string>& builtin_names();
bool is_builtin(const std::string& name);

/// x' = x + u on [0, h] with u in {-h, 0, h}, T = 3 and
/// J = -u(0) + u(1) - u(2) / 2 + max_k x(k).
ProblemSpec counterexample1(double h = 1.0);
/// Exact grids: states {0, h}, inputs {-h, 0, h}.
StageGrids counterexample1_grids(const ProblemSpec& spec, double h = 1.0);
/// Augmented with the additive part kept as stage costs; z is the running
/// maximum of x.
AugmentedSpec counterexample1_augmented(double h = 1.0);
/// Exact grids of the augmented problem: z in {0, h}.
StageGrids counterexample1_augmented_grids(const AugmentedSpec& aug, double h = 1.0);

/// x' = v with v uniform on [0, 1], u in {0, 1}, T = 2, J = -u(0) - u(1).
StochasticSpec counterexample2();
DisturbanceSampler counterexample2_sampler();
/// u = 1 on [0, 1) and 0 at x = 1.
FeedbackPolicy counterexample2_policy();

inline constexpr double kDuanOptimum = 74.767439;
inline const Vec kDuanInputs{1.5638699, 1.105823, 1.4871604};
/// Largest value of the running sum S for which S^2 stays below the optimum
/// plus the tolerance of interest; used as a bound on the carried values.
inline constexpr double kDuanSumBound = 8.65;

/// x' = x / u, x(0) = 10, T = 3 and
/// J = x(3)^2 sqrt(S) + S^2, S = u(0)^2 + u(1)^2 + u(1) u(2)^2.
ProblemSpec duan();
/// Bounds of the carried values (u0^2), (u0^2 + u1^2, u1) and S.
std::vector<Box> duan_z2_bounds();
AugmentedSpec duan_augmented();
/// Pipeline settings used by the benchmark: k points on every coordinate,
/// interpolation, pruning and lookahead lift.
PipelineOptions duan_pipeline_options(std::size_t k, unsigned threads = 1);

/// Bundled data locations.
std::string data_path(const std::string& file);
battery::LoadProfile synthetic_day();
solar::WeatherSeries tempe_weather();
/// Model fitted on the bundled weather: irradiance only (p = 1) or
/// irradiance, temperature and humidity (p = 3).
solar::GaussMarkovModel tempe_solar_model(std::size_t p = 1);
/// kW of solar power per W/m^2 of irradiance.
inline constexpr double kSolarKwPerUnit = 0.002;

}  // namespace fsdp::fixtures
