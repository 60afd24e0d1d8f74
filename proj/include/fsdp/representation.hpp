#pragma once

#include <memory>
#include <string>

#include "fsdp/types.hpp"

namespace fsdp {

/// Horizon and dimensions shared by every map of a representation.
struct Horizon {
  int t0 = 0;
  int T = 1;
  std::size_t n = 1;
  std::size_t m = 1;

  bool operator==(const Horizon&) const = default;
  std::size_t stages() const { return static_cast<std::size_t>(T - t0); }
};

/// Stage map phi_t(x, u, w). An empty `w` means the chain starts at stage t,
/// which is phi_{t0}(x, u) for a full evaluation.
using StageMap = std::function<void(int t, ConstVec x, ConstVec u, ConstVec w, MutVec out)>;
using TerminalMap = std::function<double(ConstVec x, ConstVec w)>;

/// A forward separable objective J = phi_T(x(T), phi_{T-1}(..., phi_{t0}(x(t0), u(t0)))).
struct Representation {
  Horizon horizon;
  /// dims[i] is the output dimension of phi_{t0 + i}.
  std::vector<std::size_t> dims;
  StageMap stage;
  TerminalMap terminal;
  std::string name;

  /// Set on representations built from additive costs.
  std::shared_ptr<const AdditiveCosts> additive_source;
  /// Operands of a compose_sum node.
  std::shared_ptr<const Representation> sum_lhs;
  std::shared_ptr<const Representation> sum_rhs;

  std::size_t dimension() const;
  std::size_t dim_at(int t) const { return dims.at(static_cast<std::size_t>(t - horizon.t0)); }

  /// Chained evaluation over a full trajectory.
  double evaluate(const std::vector<Vec>& inputs, const std::vector<Vec>& states) const;
  /// Chained evaluation of the tail starting at stage s; inputs[0] and
  /// states[0] belong to stage s.
  double evaluate_from(int s, const std::vector<Vec>& inputs, const std::vector<Vec>& states) const;
};

Representation additive_representation(const Horizon& h, const AdditiveCosts& costs);

/// Running maximum of stage terms d_t(x, u) and the terminal term d_T(x).
/// Null terms are skipped; at least one term must be given.
Representation max_representation(const Horizon& h, std::vector<StageCost> stage_terms,
                                  TerminalCost terminal_term);

/// sum_t a_t(x)^2 - (1/(T - t0)) (sum_t a_t(x))^2 over t = t0..T. terms[i]
/// belongs to stage t0 + i and there are T - t0 + 1 of them.
Representation variance_representation(const Horizon& h, std::vector<TerminalCost> terms);

/// sum_j (sum_t c_{j,t}(x, u)^{p_j})^{1/p_j}. terms[j][i] is c_{j, t0 + i}.
Representation pnorm_representation(const Horizon& h, std::vector<std::vector<StageCost>> terms,
                                    std::vector<double> exponents);

/// Number of stages where the predicate holds. The terminal stage is tested
/// with the state-only predicate (null counts nothing).
Representation count_representation(const Horizon& h, std::function<bool(ConstVec x, ConstVec u)> in_set,
                                    std::function<bool(ConstVec x)> terminal_in_set);

/// A representation of dimension zero whose value is `value`.
Representation constant_representation(const Horizon& h, double value);

Representation compose_sum(const Representation& r1, const Representation& r2);
Representation compose_product(const Representation& r1, const Representation& r2);
Representation compose_unary(const Representation& r, std::function<double(double)> U);

using TrajectoryFunctional = std::function<double(const std::vector<Vec>& inputs, const std::vector<Vec>& states)>;

/// History-stacking representation of an arbitrary functional. The carried
/// vector at stage t holds the states x(t0..t) followed by the inputs
/// u(t0..t). Only full evaluations from t0 are supported.
Representation naive_representation(const Horizon& h, TrajectoryFunctional J);

}  // namespace fsdp
