#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "quadloco/common.hpp"
#include "quadloco/patch.hpp"

namespace quadloco {

/// Dense row-major 2D field of doubles.
struct Grid2 {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Grid2() = default;
  Grid2(int rows_, int cols_, double fill = 0.0)
      : rows(rows_), cols(cols_), data(static_cast<std::size_t>(rows_) * cols_, fill) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

using Kernel3 = std::array<std::array<double, 3>, 3>;

namespace kernels {

inline constexpr Kernel3 kSmoothing{{{0.1, 0.1, 0.1}, {0.1, 0.2, 0.1}, {0.1, 0.1, 0.1}}};
inline constexpr Kernel3 kLaplacian{{{-1, -1, -1}, {-1, 8, -1}, {-1, -1, -1}}};
inline constexpr Kernel3 kBlur{{{1.0 / 9, 1.0 / 9, 1.0 / 9}, {1.0 / 9, 1.0 / 9, 1.0 / 9}, {1.0 / 9, 1.0 / 9, 1.0 / 9}}};

}  // namespace kernels

/// 3x3 correlation with clamp-to-edge padding; output has the input's shape.
/// Zero-sum kernels are applied to differences from the centre cell, which is the same sum
/// but gives exactly zero on constant neighbourhoods.
inline Grid2 convolve3(const Grid2& field, const Kernel3& k) {
  require(field.rows >= 3 && field.cols >= 3, "convolution field must be at least 3x3");
  double sum = 0.0;
  for (const auto& row : k)
    for (double v : row) sum += v;
  const bool zero_sum = sum == 0.0;
  Grid2 out(field.rows, field.cols);
  for (int r = 0; r < field.rows; ++r)
    for (int c = 0; c < field.cols; ++c) {
      const double centre = zero_sum ? field(r, c) : 0.0;
      double acc = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        const int rr = std::clamp(r + dr, 0, field.rows - 1);
        for (int dc = -1; dc <= 1; ++dc)
          acc += k[dr + 1][dc + 1] * (field(rr, std::clamp(c + dc, 0, field.cols - 1)) - centre);
      }
      out(r, c) = acc;
    }
  return out;
}

/// Smooth, Laplacian, absolute value, blur.
inline Grid2 edgeCostMap(const Grid2& heights) {
  Grid2 edges = convolve3(convolve3(heights, kernels::kSmoothing), kernels::kLaplacian);
  for (double& v : edges.data) v = std::abs(v);
  return convolve3(edges, kernels::kBlur);
}

inline Grid2 toGrid(const ElevationPatch& patch) {
  Grid2 g(patch.size, patch.size);
  g.data = patch.values;
  return g;
}

struct CostMap {
  Grid2 values;
  double resolution = kGridResolution;
};

inline CostMap edgeCostMap(const ElevationPatch& patch) { return {edgeCostMap(toGrid(patch)), patch.resolution}; }

inline constexpr double kFootCostRadius = 0.05;

namespace detail {

/// Three stacked 3x3 stages: a window with this margin reproduces full-map values inside it.
inline constexpr int kCostStencilMargin = 3;

}  // namespace detail

/// Edge cost under a foot at `foot` (patch-local metres): linearly decaying disc weights
/// w = max(0, 1 - r / radius), normalised to sum to one. Only a window around the foot is
/// filtered. A disc holding no positive weight falls back to the nearest cell.
inline double footEdgeCost(const ElevationPatch& patch, const Vec2& foot, double radius = kFootCostRadius) {
  require(radius > 0.0, "foot cost radius must be positive");
  if (!patch.contains(foot)) throw OutOfExtent("foot position outside elevation patch");

  const double half = patch.halfExtent();
  const double gx = (foot.x() + half) / patch.resolution;
  const double gy = (foot.y() + half) / patch.resolution;
  const int reach = static_cast<int>(std::ceil(radius / patch.resolution)) + 1;
  const int margin = reach + detail::kCostStencilMargin;
  const int j_center = static_cast<int>(std::lround(gx)), i_center = static_cast<int>(std::lround(gy));
  const int i0 = std::max(0, i_center - margin), i1 = std::min(patch.size - 1, i_center + margin);
  const int j0 = std::max(0, j_center - margin), j1 = std::min(patch.size - 1, j_center + margin);

  Grid2 window(i1 - i0 + 1, j1 - j0 + 1);
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j) window(i - i0, j - j0) = patch.at(i, j);
  if (window.rows < 3 || window.cols < 3) throw InvalidArgument("patch too small for foot cost window");
  const Grid2 cost = edgeCostMap(window);

  double weighted = 0.0, total = 0.0;
  for (int i = std::max(i0, i_center - reach); i <= std::min(i1, i_center + reach); ++i)
    for (int j = std::max(j0, j_center - reach); j <= std::min(j1, j_center + reach); ++j) {
      const double r = std::hypot(j - gx, i - gy) * patch.resolution;
      const double w = std::max(0.0, 1.0 - r / radius);
      weighted += w * cost(i - i0, j - j0);
      total += w;
    }
  if (total > 0.0) return weighted / total;
  return cost(i_center - i0, j_center - j0);
}

}  // namespace quadloco
