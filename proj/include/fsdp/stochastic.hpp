#pragma once

#include <Eigen/Dense>
#include <optional>

#include "fsdp/augment.hpp"
#include "fsdp/bellman.hpp"
#include "fsdp/rng.hpp"

namespace fsdp {

/// Coordinates of the state that evolve as x_c' = A x_c + B v, independent of
/// the input. Used to size the compact cover analytically.
struct LinearGaussianBlock {
  std::vector<std::size_t> coords;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

/// Problem with dynamics x' = f(x, u, t, v), v ~ N(0, I_q) per stage. State
/// boxes may have infinite bounds on disturbance driven coordinates.
struct StochasticSpec {
  int t0 = 0;
  int T = 1;
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t q = 1;
  StochasticDynamics dynamics;
  std::vector<Box> state_boxes;
  Box input_box;
  Objective objective;
  Vec x0;
  std::optional<LinearGaussianBlock> linear_block;

  Horizon horizon() const { return {t0, T, n, m}; }
  const Box& state_box(int t) const { return state_boxes.at(static_cast<std::size_t>(t - t0)); }
  bool is_additive() const { return std::holds_alternative<AdditiveCosts>(objective); }
  const AdditiveCosts& costs() const;
  const Representation& representation() const;
  void validate() const;
};

/// Draws one disturbance vector. The default law is standard normal; other
/// laws are only for fixtures.
using DisturbanceSampler = std::function<void(CounterRng& rng, MutVec v)>;
void standard_normal_sampler(CounterRng& rng, MutVec v);

/// State reached at stage t from x0 at stage `start`, with disturbances[i]
/// applied at stage start + i.
Vec state_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0, int t,
              const std::vector<Vec>& disturbances, int start);
Vec state_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0, int t,
              const std::vector<Vec>& disturbances);

/// Full trajectory from stage `start`, with the tail objective attached.
Trajectory trajectory_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0,
                          const std::vector<Vec>& disturbances, int start);
Trajectory trajectory_map(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0,
                          const std::vector<Vec>& disturbances);

/// Weighted node set realizing the expectation over v.
struct QuadratureRule {
  std::vector<Vec> nodes;
  Vec weights;

  std::size_t dim() const { return nodes.empty() ? 0 : nodes.front().size(); }
  std::size_t size() const { return nodes.size(); }

  /// Probabilists' Gauss-Hermite rule with k nodes for N(0, 1).
  static QuadratureRule gauss_hermite_1d(std::size_t k);
  /// Tensor product of 1-D Gauss-Hermite rules.
  static QuadratureRule gauss_hermite(std::size_t q, std::size_t k);
  /// Equal-weight standard normal samples.
  static QuadratureRule monte_carlo(std::size_t q, std::size_t count, std::uint64_t seed);
  /// Gauss-Hermite for q <= 3, otherwise k^3 Monte-Carlo samples.
  static QuadratureRule standard(std::size_t q, std::size_t k, std::uint64_t seed = 1);
  /// Arbitrary nodes, weights normalized to sum to 1.
  static QuadratureRule from_nodes(std::vector<Vec> nodes, Vec weights);
};

/// Per-stage boxes H_t that hold the state with high probability.
struct CompactCover {
  int t0 = 0;
  std::vector<Box> boxes;
  double epsilon = 0.0;
  /// Half-width multiplier c applied to per-stage standard deviations.
  double multiplier = 0.0;
  /// Largest per-stage escape fraction measured during validation.
  double achieved_escape = 0.0;

  const Box& at(int t) const { return boxes.at(static_cast<std::size_t>(t - t0)); }
};

struct CoverOptions {
  double safety = 1.0;
  std::size_t validation_paths = 10000;
  std::uint64_t seed = 11;
  /// Inputs used while validating; uniform random inputs when unset.
  FeedbackPolicy policy;
};

/// Coordinates of the linear Gaussian block get mean +- c sigma_t with
/// sigma_t from Sigma_{t+1} = A Sigma_t A^T + B B^T and
/// c = safety * quantile(1 - epsilon / (2 p)), so the per-stage union bound
/// over the p block coordinates is epsilon.
/// Coordinates with finite state bounds use the state box. The cover is
/// validated by simulating paths and measuring per-stage escape.
CompactCover build_compact_cover(const StochasticSpec& spec, double epsilon, const CoverOptions& opts = {});

/// Standard normal quantile.
double normal_quantile(double p);

/// Per-stage covariance of the linear block started from zero covariance.
std::vector<Eigen::MatrixXd> covariance_recursion(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int steps);

struct DiscreteStochasticProblem {
  StochasticSpec spec;
  CompactCover cover;
  StageGrids grids;
  QuadratureRule rule;
};

DiscreteStochasticProblem discretize_stochastic(const StochasticSpec& spec, const CompactCover& cover,
                                                const std::vector<std::size_t>& k_state,
                                                const std::vector<std::size_t>& k_input, QuadratureRule rule);

/// F(x, t) = min_u { c_t(x, u) + sum_i w_i F(proj(f(x, u, t, v_i)), t + 1) }.
/// An input is feasible when every node keeps the finite-bounded
/// coordinates inside X_{t+1}; successors are clamped onto the stage grid.
ValueTable solve_bellman_stochastic(const DiscreteStochasticProblem& disc, const SolveOptions& opts = {});

/// Tabular policy lifted to the original stochastic problem. Feasibility of
/// an input is checked against every quadrature node.
FeedbackPolicy lift_policy_stochastic(const TabularPolicy& tab, const DiscreteStochasticProblem& disc,
                                      const LiftOptions& opts = {}, const ValueTable* vt = nullptr);

struct MonteCarloOptions {
  DisturbanceSampler sampler;
  unsigned threads = 1;
  /// Stage the paths start from; defaults to t0.
  std::optional<int> start;
};

struct MonteCarloResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::string first_error;
};

/// Mean objective over N disturbance paths. Path i draws from the stream
/// (seed, i). Paths whose rollout throws are counted in `failures` and left
/// out of the mean.
MonteCarloResult expected_cost_monte_carlo(const StochasticSpec& spec, const FeedbackPolicy& policy, ConstVec x0,
                                           std::size_t N, std::uint64_t seed, const MonteCarloOptions& opts = {});

/// Disturbance path of stream (seed, index) for stages start..T-1.
std::vector<Vec> sample_disturbances(const StochasticSpec& spec, std::uint64_t seed, std::uint64_t index, int start,
                                     const DisturbanceSampler& sampler = {});

/// Augmented version of a stochastic problem; see augment().
StochasticSpec augment_stochastic(const StochasticSpec& spec, const std::vector<Box>& z2_bounds,
                                  const AugmentOptions& opts = {});

/// The deterministic problem obtained by fixing v = 0.
ProblemSpec zero_noise_problem(const StochasticSpec& spec);

}  // namespace fsdp
