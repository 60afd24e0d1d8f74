#include "fsdp/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "fsdp/errors.hpp"

namespace fsdp::fixtures {

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"counterexample1", "counterexample2", "duan", "battery-det",
                                              "battery-stoch"};
  return names;
}

bool is_builtin(const std::string& name) {
  const auto& n = builtin_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

ProblemSpec counterexample1(double h) {
  if (!(h > 0.0)) throw InvalidArgument("step h must be positive");
  ProblemSpec spec;
  spec.t0 = 0;
  spec.T = 3;
  spec.n = 1;
  spec.m = 1;
  spec.dynamics = [](ConstVec x, ConstVec u, int, MutVec next) { next[0] = x[0] + u[0]; };
  spec.state_boxes.assign(4, Box({0.0}, {h}));
  spec.input_box = Box({-h}, {h});
  spec.x0 = {0.0};
  AdditiveCosts c;
  c.stage_costs = {[](ConstVec, ConstVec u) { return -u[0]; }, [](ConstVec, ConstVec u) { return u[0]; },
                   [](ConstVec, ConstVec u) { return -u[0] / 2.0; }};
  c.terminal_cost = [](ConstVec) { return 0.0; };
  auto x_term = [](ConstVec x, ConstVec) { return x[0]; };
  Representation peak = max_representation(spec.horizon(), {x_term, x_term, x_term}, [](ConstVec x) { return x[0]; });
  spec.objective = compose_sum(additive_representation(spec.horizon(), c), peak);
  spec.validate();
  return spec;
}

StageGrids counterexample1_grids(const ProblemSpec& spec, double h) {
  return make_stage_grids(spec.state_boxes, spec.t0, Box({-h}, {h}), {2}, {3});
}

AugmentedSpec counterexample1_augmented(double h) {
  ProblemSpec spec = counterexample1(h);
  std::vector<Box> z2{Box(), Box({0.0}, {h}), Box({0.0}, {h}), Box({0.0}, {h})};
  AugmentOptions opts;
  opts.separate_additive = true;
  return augment(spec, z2, opts);
}

StageGrids counterexample1_augmented_grids(const AugmentedSpec& aug, double h) {
  return make_stage_grids(aug.spec.state_boxes, aug.spec.t0, Box({-h}, {h}), {2}, {3});
}

StochasticSpec counterexample2() {
  StochasticSpec spec;
  spec.t0 = 0;
  spec.T = 2;
  spec.n = 1;
  spec.m = 1;
  spec.q = 1;
  spec.dynamics = [](ConstVec, ConstVec, int, ConstVec v, MutVec next) { next[0] = v[0]; };
  spec.state_boxes.assign(3, Box({0.0}, {1.0}));
  spec.input_box = Box({0.0}, {1.0});
  spec.x0 = {0.0};
  AdditiveCosts c;
  c.stage_costs.assign(2, [](ConstVec, ConstVec u) { return -u[0]; });
  c.terminal_cost = [](ConstVec) { return 0.0; };
  spec.objective = c;
  spec.validate();
  return spec;
}

DisturbanceSampler counterexample2_sampler() {
  return [](CounterRng& rng, MutVec v) { v[0] = rng.uniform(); };
}

FeedbackPolicy counterexample2_policy() {
  return [](ConstVec x, int) { return Vec{x[0] < 1.0 ? 1.0 : 0.0}; };
}

ProblemSpec duan() {
  ProblemSpec spec;
  spec.t0 = 0;
  spec.T = 3;
  spec.n = 1;
  spec.m = 1;
  spec.dynamics = [](ConstVec x, ConstVec u, int, MutVec next) { next[0] = x[0] / u[0]; };
  spec.state_boxes = {Box({10.0}, {10.0}), Box({1.0}, {12.0}), Box({1.0}, {12.0}), Box({1.0}, {12.0})};
  spec.input_box = Box({0.01}, {5.0});
  spec.x0 = {10.0};
  Representation r;
  r.horizon = spec.horizon();
  r.dims = {1, 2, 1};
  r.stage = [](int t, ConstVec, ConstVec u, ConstVec w, MutVec out) {
    const double u2 = u[0] * u[0];
    switch (t) {
      case 0:
        out[0] = u2;
        break;
      case 1:
        out[0] = w[0] + u2;
        out[1] = u[0];
        break;
      default:
        out[0] = w[0] + w[1] * u2;
        break;
    }
  };
  r.terminal = [](ConstVec x, ConstVec w) { return x[0] * x[0] * std::sqrt(w[0]) + w[0] * w[0]; };
  r.name = "duan";
  spec.objective = r;
  spec.validate();
  return spec;
}

std::vector<Box> duan_z2_bounds() {
  const double s = kDuanSumBound;
  return {Box(), Box({0.0}, {s}), Box({0.0, 0.01}, {s, std::sqrt(s)}), Box({0.0}, {s})};
}

AugmentedSpec duan_augmented() {
  AugmentOptions opts;
  // The bounds are constraints that cannot cut off the optimum, not
  // enclosures of every reachable value.
  opts.validation_samples = 0;
  return augment(duan(), duan_z2_bounds(), opts);
}

PipelineOptions duan_pipeline_options(std::size_t k, unsigned threads) {
  PipelineOptions o;
  o.k_state = {k};
  o.k_input = {k};
  o.solve.interpolate = true;
  o.solve.threads = threads;
  o.solve.on_empty = EmptySetPolicy::kPrune;
  o.lift.mode = LiftMode::kLookahead;
  return o;
}

std::string data_path(const std::string& file) { return std::string(FSDP_DATA_DIR) + "/" + file; }

battery::LoadProfile synthetic_day() { return battery::read_load_csv(data_path("synthetic_day.csv")); }

solar::WeatherSeries tempe_weather() { return solar::read_weather_csv(data_path("tempe_weather.csv")); }

solar::GaussMarkovModel tempe_solar_model(std::size_t p) {
  if (p != 1 && p != 3) throw InvalidArgument("bundled solar model has 1 or 3 states");
  solar::NormalizedSeries data = solar::normalize(tempe_weather());
  std::vector<std::size_t> vars{0};
  if (p == 3) vars = {0, 1, 2};
  return solar::fit(data, vars);
}

}  // namespace fsdp::fixtures
