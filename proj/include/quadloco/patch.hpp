#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "quadloco/common.hpp"
#include "quadloco/heightfield.hpp"

namespace quadloco {

inline constexpr int kPatchSize = 91;
inline constexpr double kPatchClip = 2.0;

/// Robot-local, gravity-aligned elevation patch in metres. Cell (i, j) lies at
/// local offset ((j - centre) * resolution, (i - centre) * resolution) from the sampling pose.
struct ElevationPatch {
  int size = kPatchSize;
  double resolution = kGridResolution;
  Pose2 center_pose;
  std::vector<double> values;

  ElevationPatch() : values(static_cast<std::size_t>(kPatchSize) * kPatchSize, 0.0) {}
  explicit ElevationPatch(int size_, double resolution_ = kGridResolution)
      : size(size_), resolution(resolution_), values(static_cast<std::size_t>(size_) * size_, 0.0) {
    require(size > 0 && resolution > 0.0, "patch size and resolution must be positive");
  }

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * size + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * size + j]; }

  double halfExtent() const { return 0.5 * (size - 1) * resolution; }

  /// Local metric position of cell (i, j).
  Vec2 cellPosition(int i, int j) const {
    return Vec2(j * resolution - halfExtent(), i * resolution - halfExtent());
  }

  bool contains(const Vec2& local, double slack = 1e-9) const {
    return std::abs(local.x()) <= halfExtent() + slack && std::abs(local.y()) <= halfExtent() + slack;
  }

  /// Bilinear sample at a local position (clamped to the patch).
  double sample(const Vec2& local) const {
    const double gx = std::clamp((local.x() + halfExtent()) / resolution, 0.0, size - 1.0);
    const double gy = std::clamp((local.y() + halfExtent()) / resolution, 0.0, size - 1.0);
    const int j0 = std::min(static_cast<int>(gx), size - 1), i0 = std::min(static_cast<int>(gy), size - 1);
    const int j1 = std::min(j0 + 1, size - 1), i1 = std::min(i0 + 1, size - 1);
    const double tx = gx - j0, ty = gy - i0;
    return (1 - ty) * ((1 - tx) * at(i0, j0) + tx * at(i0, j1)) + ty * ((1 - tx) * at(i1, j0) + tx * at(i1, j1));
  }
};

/// Slices a yaw-rotated 91 x 91 patch around `center`. Heights are taken relative to
/// `reference_height`, clipped to [-2, 2] m; samples off the terrain use the nearest edge cell.
inline ElevationPatch slicePatch(const Heightfield& hf, const Vec2& center, double yaw,
                                 double reference_height = 0.0) {
  ElevationPatch patch;
  patch.resolution = hf.resolution;
  patch.center_pose = Pose2{center, yaw};
  for (int i = 0; i < patch.size; ++i)
    for (int j = 0; j < patch.size; ++j) {
      const Vec2 w = patch.center_pose.toWorld(patch.cellPosition(i, j));
      const double h = detail::bilinearClamped(hf, (w.x() - hf.origin.x()) / hf.resolution,
                                               (w.y() - hf.origin.y()) / hf.resolution);
      patch.at(i, j) = std::clamp(h - reference_height, -kPatchClip, kPatchClip);
    }
  return patch;
}

struct AugmentationSpec {
  int rotation = 0;  // quarter turns, counter-clockwise
  bool mirror_x = false;  // negate local x (reverse columns)
  bool mirror_y = false;  // negate local y (reverse rows)
  double contrast_gain = 1.0;
  double noise_sigma = 0.0;
  double min_gain = 0.5;
  double max_gain = 2.0;
};

inline ElevationPatch rotateQuarterTurns(const ElevationPatch& p, int turns) {
  turns = ((turns % 4) + 4) % 4;
  ElevationPatch out = p;
  const int n = p.size - 1;
  for (int i = 0; i < p.size; ++i)
    for (int j = 0; j < p.size; ++j) {
      // Local (x, y) -> (-y, x) per quarter turn.
      int si = i, sj = j;
      for (int k = 0; k < turns; ++k) {
        const int ti = sj, tj = n - si;
        si = ti;
        sj = tj;
      }
      out.at(si, sj) = p.at(i, j);
    }
  return out;
}

/// Rotate, mirror, scale contrast about the mean, add N(0, sigma^2) noise, and re-clip.
inline ElevationPatch augmentPatch(const ElevationPatch& p, const AugmentationSpec& spec, std::uint64_t seed) {
  require(spec.contrast_gain >= spec.min_gain && spec.contrast_gain <= spec.max_gain,
          "contrast gain outside the configured range");
  require(spec.noise_sigma >= 0.0, "noise sigma must be non-negative");

  ElevationPatch out = rotateQuarterTurns(p, spec.rotation);
  const int n = out.size - 1;
  if (spec.mirror_x)
    for (int i = 0; i < out.size; ++i)
      for (int j = 0; j < out.size / 2; ++j) std::swap(out.at(i, j), out.at(i, n - j));
  if (spec.mirror_y)
    for (int i = 0; i < out.size / 2; ++i)
      for (int j = 0; j < out.size; ++j) std::swap(out.at(i, j), out.at(n - i, j));

  if (spec.contrast_gain != 1.0) {
    double mean = 0.0;
    for (double v : out.values) mean += v;
    mean /= static_cast<double>(out.values.size());
    for (double& v : out.values) v = mean + spec.contrast_gain * (v - mean);
  }
  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (double& v : out.values) v += noise(rng);
  }
  for (double& v : out.values) v = std::clamp(v, -kPatchClip, kPatchClip);
  return out;
}

}  // namespace quadloco
