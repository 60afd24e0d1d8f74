#pragma once

#include <cstdint>
#include <optional>

#include "fsdp/grid.hpp"
#include "fsdp/problem.hpp"

namespace fsdp {

struct BruteForceOptions {
  /// Largest number of input sequences an enumeration may visit.
  double max_sequences = 1e7;
};

struct BruteForceResult {
  Trajectory best;
  double optimal_value = 0.0;
  std::vector<std::size_t> input_indices;
  std::size_t feasible_sequences = 0;
};

/// Called once per feasible input sequence, in lexicographic order of input
/// grid indices.
using SequenceVisitor = std::function<void(const std::vector<std::size_t>& input_indices, const Trajectory& tr)>;

/// Exhaustive search over input grid sequences of the (optionally projected)
/// problem. Ties go to the lexicographically smallest index sequence.
BruteForceResult brute_force_solve(const ProblemSpec& spec, const StageGrids& grids, const BruteForceOptions& opts = {});

/// Same search for the tail sub-problem starting at stage s from x.
BruteForceResult brute_force_solve_from(const ProblemSpec& spec, const StageGrids& grids, int s, ConstVec x,
                                        const BruteForceOptions& opts = {});

void enumerate_feasible(const ProblemSpec& spec, const StageGrids& grids, const SequenceVisitor& visit,
                        const BruteForceOptions& opts = {});

struct PrincipleViolation {
  int stage = 0;
  Vec state;
  double tail_value = 0.0;
  double sub_optimum = 0.0;
  std::vector<Vec> tail_inputs;
  std::vector<Vec> sub_inputs;
};

struct PrincipleReport {
  BruteForceResult optimum;
  std::vector<PrincipleViolation> violations;
};

/// Checks that each tail of the brute-force optimum is optimal for the sub
/// problem started at the tail's first state, for every t0 < s < T.
PrincipleReport verify_principle_violation(const ProblemSpec& spec, const StageGrids& grids,
                                           const BruteForceOptions& opts = {});

/// Grids with no state projection, only an input grid.
StageGrids input_only_grids(const ProblemSpec& spec, const TensorGrid& inputs);

}  // namespace fsdp
