#include "fsdp/grid.hpp"

#include <algorithm>
#include <cmath>

#include "fsdp/errors.hpp"

namespace fsdp {

GridSpec::GridSpec(double lower, double upper, std::size_t k) : lower_(lower), upper_(upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) throw InvalidArgument("grid interval must be finite");
  if (lower > upper) throw InvalidArgument("grid interval has lower > upper");
  if (lower == upper) {
    points_.assign(1, lower);
    return;
  }
  if (k < 2) throw InvalidArgument("a non-degenerate grid needs at least 2 points");
  spacing_ = (upper - lower) / static_cast<double>(k - 1);
  points_.resize(k);
  for (std::size_t i = 0; i + 1 < k; ++i) points_[i] = lower + static_cast<double>(i) * spacing_;
  points_[k - 1] = upper;
}

GridSpec GridSpec::with_spacing(double lower, double upper, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grid spacing must be positive");
  if (lower == upper) return GridSpec(lower, upper, 1);
  auto intervals = static_cast<std::size_t>(std::ceil((upper - lower) / h - 1e-9));
  return GridSpec(lower, upper, std::max<std::size_t>(intervals, 1) + 1);
}

std::size_t GridSpec::locate(double x, double& frac) const {
  const std::size_t k = points_.size();
  frac = 0.0;
  if (k == 1) return 0;
  if (std::isnan(x)) throw InvalidArgument("grid query is NaN");
  if (x <= lower_) return 0;
  if (x >= upper_) {
    frac = 1.0;
    return k - 2;
  }
  double pos = (x - lower_) / spacing_;
  auto i = static_cast<std::size_t>(std::min(pos, static_cast<double>(k - 2)));
  while (i > 0 && x < points_[i]) --i;
  while (i + 2 < k && x > points_[i + 1]) ++i;
  frac = std::clamp((x - points_[i]) / (points_[i + 1] - points_[i]), 0.0, 1.0);
  return i;
}

std::size_t GridSpec::nearest(double x) const {
  if (points_.size() == 1) return 0;
  double frac;
  std::size_t i = locate(x, frac);
  if (x <= lower_) return 0;
  if (x >= upper_) return points_.size() - 1;
  double below = x - points_[i];
  double above = points_[i + 1] - x;
  return above < below ? i + 1 : i;
}

TensorGrid::TensorGrid(std::vector<GridSpec> axes) : axes_(std::move(axes)) {
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t i = axes_.size(); i-- > 0;) {
    strides_[i] = size_;
    size_ *= axes_[i].size();
  }
}

namespace {

std::vector<GridSpec> axes_from_box(const Box& box, const std::vector<std::size_t>& k) {
  if (k.size() != 1 && k.size() != box.dim()) throw InvalidArgument("grid point counts differ from the box dimension");
  std::vector<GridSpec> axes;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    axes.emplace_back(box.lower[i], box.upper[i], k.size() == 1 ? k[0] : k[i]);
  }
  return axes;
}

}  // namespace

TensorGrid::TensorGrid(const Box& box, const std::vector<std::size_t>& k) : TensorGrid(axes_from_box(box, k)) {}

Box TensorGrid::box() const {
  Vec lo, hi;
  for (const auto& a : axes_) {
    lo.push_back(a.lower());
    hi.push_back(a.upper());
  }
  return Box(std::move(lo), std::move(hi));
}

void TensorGrid::point(std::size_t index, MutVec out) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    out[i] = axes_[i][(index / strides_[i]) % axes_[i].size()];
  }
}

Vec TensorGrid::point(std::size_t index) const {
  Vec out(axes_.size());
  point(index, out);
  return out;
}

std::size_t TensorGrid::flat_index(const std::vector<std::size_t>& multi) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) idx += multi[i] * strides_[i];
  return idx;
}

std::vector<std::size_t> TensorGrid::multi_index(std::size_t index) const {
  std::vector<std::size_t> multi(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) multi[i] = (index / strides_[i]) % axes_[i].size();
  return multi;
}

std::size_t TensorGrid::nearest(ConstVec x) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) idx += axes_[i].nearest(x[i]) * strides_[i];
  return idx;
}

double TensorGrid::interpolate(std::span<const double> values, ConstVec x) const {
  constexpr std::size_t kMaxActive = 20;
  std::size_t base = 0;
  std::size_t stride[kMaxActive];
  double frac[kMaxActive];
  std::size_t active = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const GridSpec& g = axes_[i];
    if (g.size() == 1) continue;
    double f;
    std::size_t c = g.locate(x[i], f);
    if (f == 0.0) {
      base += c * strides_[i];
    } else if (f == 1.0) {
      base += (c + 1) * strides_[i];
    } else {
      if (active == kMaxActive) throw InvalidArgument("interpolation supports at most 20 active axes");
      base += c * strides_[i];
      stride[active] = strides_[i];
      frac[active] = f;
      ++active;
    }
  }
  if (active == 0) return values[base];
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << active;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t offset = base;
    for (std::size_t j = 0; j < active; ++j) {
      if (mask & (std::size_t{1} << j)) {
        w *= frac[j];
        offset += stride[j];
      } else {
        w *= 1.0 - frac[j];
      }
    }
    if (w != 0.0) acc += w * values[offset];
  }
  return acc;
}

}  // namespace fsdp
