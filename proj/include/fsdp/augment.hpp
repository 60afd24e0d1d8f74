#pragma once

#include <cstdint>

#include "fsdp/problem.hpp"

namespace fsdp {

struct AugmentOptions {
  /// Random input sequences rolled out to check that z2 stays in its bounds.
  std::size_t validation_samples = 200;
  std::uint64_t seed = 1;
  /// When the representation is compose_sum(additive, rest), keep the
  /// additive part as stage costs and augment only `rest`.
  bool separate_additive = false;
};

/// Additively separable problem over z = (x, z2) equivalent to `spec`.
struct AugmentedSpec {
  ProblemSpec spec;
  /// z2 bounds per stage t0..T, padded to the representation dimension.
  std::vector<Box> z2_bounds;
  std::size_t base_dim = 0;
  std::size_t representation_dim = 0;
  bool separated = false;

  /// Original state part of an augmented state.
  Vec base_state(ConstVec z) const { return Vec(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(base_dim)); }
};

/// Builds the augmented problem. z2_bounds[i] bounds the carried value
/// entering stage t0 + i (i = 0..T - t0); entry 0 is forced to {0}. Entries
/// may be shorter than the representation dimension and are padded with
/// {0}.
AugmentedSpec augment(const ProblemSpec& spec, const std::vector<Box>& z2_bounds, const AugmentOptions& opts = {});

struct BoundEstimateOptions {
  std::size_t probe_points = 5;
  std::size_t max_probes = 200000;
  /// Relative padding of each estimated interval.
  double margin = 0.0;
  std::uint64_t seed = 7;
};

/// Estimates z2 bounds by propagating probe points of X_t x U x Z_t through
/// phi_t stage by stage. The boxes are bounding boxes of sampled values, not
/// guaranteed enclosures; pass a margin when the maps are not monotone.
std::vector<Box> estimate_z2_bounds(const ProblemSpec& spec, const BoundEstimateOptions& opts = {});

/// The part of the representation that augment would carry in the state.
const Representation& augmented_part(const Representation& r, bool separate_additive);

}  // namespace fsdp
