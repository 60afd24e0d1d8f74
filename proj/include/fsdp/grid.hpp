#pragma once

#include <cstdint>

#include "fsdp/types.hpp"

namespace fsdp {

/// k uniformly spaced points on [lower, upper] including both endpoints.
/// A degenerate interval (lower == upper) holds exactly one point.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(double lower, double upper, std::size_t k);
  /// Smallest uniform grid on [lower, upper] whose spacing does not exceed h.
  static GridSpec with_spacing(double lower, double upper, double h);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  std::size_t size() const { return points_.size(); }
  double spacing() const { return spacing_; }
  const Vec& points() const { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

  /// Index of the nearest point; exact midpoints resolve to the lower index.
  std::size_t nearest(double x) const;
  /// Cell containing x (clamped to the interval): returns i with
  /// points[i] <= x <= points[i + 1] and writes the local coordinate.
  std::size_t locate(double x, double& frac) const;

 private:
  double lower_ = 0.0;
  double upper_ = 0.0;
  double spacing_ = 0.0;
  Vec points_{0.0};
};

/// Tensor product of per-coordinate grids, flattened row-major (the last
/// coordinate varies fastest).
class TensorGrid {
 public:
  TensorGrid() = default;
  explicit TensorGrid(std::vector<GridSpec> axes);
  TensorGrid(const Box& box, const std::vector<std::size_t>& k);

  std::size_t dim() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<GridSpec>& axes() const { return axes_; }
  const GridSpec& axis(std::size_t i) const { return axes_[i]; }
  Box box() const;

  void point(std::size_t index, MutVec out) const;
  Vec point(std::size_t index) const;
  std::size_t flat_index(const std::vector<std::size_t>& multi) const;
  std::vector<std::size_t> multi_index(std::size_t index) const;

  /// Flat index of the nearest grid point (per-coordinate nearest, which is
  /// the Euclidean nearest point of a tensor grid).
  std::size_t nearest(ConstVec x) const;
  /// Multilinear interpolation of grid values at x, clamped to the grid box.
  /// On-grid queries return the stored value exactly.
  double interpolate(std::span<const double> values, ConstVec x) const;

 private:
  std::vector<GridSpec> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

/// Per-stage state grids plus the input grid of a discretized problem. An
/// empty `states` means the dynamics are used without projection.
struct StageGrids {
  int t0 = 0;
  std::vector<TensorGrid> states;
  TensorGrid inputs;

  bool projects() const { return !states.empty(); }
  const TensorGrid& at(int t) const { return states.at(static_cast<std::size_t>(t - t0)); }
};

}  // namespace fsdp
