#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "quadloco/common.hpp"

namespace quadloco {

inline constexpr int kMaxCode = 65535;
inline constexpr double kGridResolution = 0.02;
inline constexpr double kDefaultZScale = 2.0;
inline constexpr int kWorldCells = 1001;
inline constexpr int kEvalCells = 251;

/// Integer elevation grid. Cell (row, col) sits at world
/// (origin.x + col * resolution, origin.y + row * resolution); rows run along y.
struct Heightfield {
  int rows = kWorldCells;
  int cols = kWorldCells;
  double resolution = kGridResolution;
  double z_scale = kDefaultZScale;  // metres represented by code 65535
  Vec2 origin = Vec2::Zero();
  std::vector<std::uint16_t> cells;

  Heightfield() = default;
  Heightfield(int rows_, int cols_, double resolution_ = kGridResolution,
              double z_scale_ = kDefaultZScale, Vec2 origin_ = Vec2::Zero())
      : rows(rows_), cols(cols_), resolution(resolution_), z_scale(z_scale_), origin(origin_) {
    require(rows > 0 && cols > 0, "heightfield dimensions must be positive");
    require(resolution > 0.0 && z_scale > 0.0, "resolution and z_scale must be positive");
    cells.assign(static_cast<std::size_t>(rows) * cols, 0);
  }

  std::uint16_t& at(int row, int col) { return cells[static_cast<std::size_t>(row) * cols + col]; }
  std::uint16_t at(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col]; }

  double metres(std::uint16_t code) const { return code * z_scale / kMaxCode; }
  double heightAtCell(int row, int col) const { return metres(at(row, col)); }

  /// Rounded code for a metric height, saturating at both ends of the range.
  std::uint16_t encode(double height) const {
    const double code = std::round(height * kMaxCode / z_scale);
    return static_cast<std::uint16_t>(std::clamp(code, 0.0, static_cast<double>(kMaxCode)));
  }

  Vec2 cellPosition(int row, int col) const {
    return origin + Vec2(col * resolution, row * resolution);
  }
  double maxX() const { return origin.x() + (cols - 1) * resolution; }
  double maxY() const { return origin.y() + (rows - 1) * resolution; }

  bool contains(const Vec2& p, double slack = 1e-9) const {
    return p.x() >= origin.x() - slack && p.x() <= maxX() + slack &&
           p.y() >= origin.y() - slack && p.y() <= maxY() + slack;
  }

  bool operator==(const Heightfield& other) const {
    return rows == other.rows && cols == other.cols && resolution == other.resolution &&
           z_scale == other.z_scale && origin == other.origin && cells == other.cells;
  }
};

namespace detail {

/// Bilinear sample at fractional grid coordinates, clamped to the grid.
inline double bilinearClamped(const Heightfield& hf, double gx, double gy) {
  gx = std::clamp(gx, 0.0, static_cast<double>(hf.cols - 1));
  gy = std::clamp(gy, 0.0, static_cast<double>(hf.rows - 1));
  const int c0 = std::min(static_cast<int>(std::floor(gx)), hf.cols - 1);
  const int r0 = std::min(static_cast<int>(std::floor(gy)), hf.rows - 1);
  const int c1 = std::min(c0 + 1, hf.cols - 1);
  const int r1 = std::min(r0 + 1, hf.rows - 1);
  const double tx = gx - c0, ty = gy - r0;
  const double h00 = hf.heightAtCell(r0, c0), h01 = hf.heightAtCell(r0, c1);
  const double h10 = hf.heightAtCell(r1, c0), h11 = hf.heightAtCell(r1, c1);
  return (1 - ty) * ((1 - tx) * h00 + tx * h01) + ty * ((1 - tx) * h10 + tx * h11);
}

}  // namespace detail

/// Bilinear terrain height in metres at world (x, y).
inline double heightAt(const Heightfield& hf, double x, double y) {
  if (!hf.contains(Vec2(x, y))) {
    throw OutOfExtent("height query (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside terrain extent");
  }
  return detail::bilinearClamped(hf, (x - hf.origin.x()) / hf.resolution,
                                 (y - hf.origin.y()) / hf.resolution);
}

inline double heightAt(const Heightfield& hf, const Vec2& p) { return heightAt(hf, p.x(), p.y()); }

/// Largest interpolated height along the segment, sampled at most half a cell apart.
inline double maxHeightOnSegment(const Heightfield& hf, const Vec2& p0, const Vec2& p1) {
  if (!hf.contains(p0) || !hf.contains(p1)) throw OutOfExtent("segment endpoint outside terrain extent");
  const double length = (p1 - p0).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(length / (0.5 * hf.resolution))));
  double best = heightAt(hf, p0);
  for (int i = 1; i <= steps; ++i) {
    const Vec2 p = p0 + (p1 - p0) * (static_cast<double>(i) / steps);
    best = std::max(best, heightAt(hf, p));
  }
  return best;
}

// ─── Terrain objects ────────────────────────────────────────────────────────

struct Stairs {
  int n_steps = 4;
  double total_height = 0.3;
  double run_depth = 0.3;
};

/// Raised cosine profile along the object length: h = amplitude * (1 + cos(period * u)) / 2,
/// u being the signed distance from the footprint centre. `period` is in rad/m.
struct Wave {
  double amplitude = 0.1;
  double period = kPi;
};

struct Bricks {
  double cell_size = 0.10;
  double height = 0.05;
};

struct Unstructured {
  double amplitude = 0.02;
  double smoothing_sigma = 3.0;  // cells
};

/// Parallel planks across the object width; these defaults are not taken from measured data.
struct Planks {
  double width = 0.25;
  double height = 0.10;
  double gap = 0.05;
};

using TerrainShape = std::variant<Stairs, Wave, Bricks, Unstructured, Planks>;

struct TerrainObjectSpec {
  TerrainShape shape;
  Vec2 offset = Vec2::Zero();  // world xy of the footprint centre
  double yaw = 0.0;
  double length = 2.0;  // along the object's local x axis
  double width = 2.0;   // along the object's local y axis
};

inline std::string shapeName(const TerrainShape& shape) {
  static const char* names[] = {"stairs", "wave", "bricks", "unstructured", "planks"};
  return names[shape.index()];
}

inline void validate(const TerrainObjectSpec& spec) {
  require(spec.length > 0.0 && spec.width > 0.0, "object footprint must be positive");
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Stairs>) {
          require(s.n_steps >= 3 && s.n_steps <= 8, "stairs step count must lie in [3, 8]");
          require(s.total_height > 0.0 && s.run_depth > 0.0, "stairs parameters must be positive");
        } else if constexpr (std::is_same_v<T, Wave>) {
          require(s.amplitude > 0.0 && s.period > 0.0, "wave parameters must be positive");
        } else if constexpr (std::is_same_v<T, Bricks>) {
          require(s.cell_size > 0.0 && s.height > 0.0, "bricks parameters must be positive");
        } else if constexpr (std::is_same_v<T, Unstructured>) {
          require(s.amplitude > 0.0 && s.smoothing_sigma > 0.0, "unstructured parameters must be positive");
        } else {
          require(s.width > 0.0 && s.height > 0.0 && s.gap > 0.0, "planks parameters must be positive");
        }
      },
      spec.shape);
}

namespace detail {

inline std::mt19937_64 objectRng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

/// Separable Gaussian blur with clamp-to-edge borders.
inline std::vector<double> gaussianBlur(const std::vector<double>& in, int nx, int ny, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    sum += kernel[k + radius];
  }
  for (double& w : kernel) w /= sum;

  std::vector<double> tmp(in.size()), out(in.size());
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * in[y * nx + std::clamp(x + k, 0, nx - 1)];
      tmp[y * nx + x] = acc;
    }
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp[std::clamp(y + k, 0, ny - 1) * nx + x];
      out[y * nx + x] = acc;
    }
  return out;
}

/// Metric height field of one object, evaluated in its local frame (u along length, v along width).
class ObjectProfile {
 public:
  ObjectProfile(const TerrainObjectSpec& spec, double resolution, std::mt19937_64& rng)
      : spec_(spec), resolution_(resolution) {
    if (const auto* bricks = std::get_if<Bricks>(&spec.shape)) {
      bricks_x_ = static_cast<int>(std::ceil(spec.length / bricks->cell_size));
      bricks_y_ = static_cast<int>(std::ceil(spec.width / bricks->cell_size));
      std::uniform_int_distribution<int> level(-1, 1);
      brick_levels_.resize(static_cast<std::size_t>(bricks_x_) * bricks_y_);
      for (int& l : brick_levels_) l = level(rng);
    } else if (const auto* rough = std::get_if<Unstructured>(&spec.shape)) {
      noise_x_ = static_cast<int>(std::lround(spec.length / resolution)) + 1;
      noise_y_ = static_cast<int>(std::lround(spec.width / resolution)) + 1;
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      std::vector<double> raw(static_cast<std::size_t>(noise_x_) * noise_y_);
      for (double& r : raw) r = unit(rng);
      noise_ = gaussianBlur(raw, noise_x_, noise_y_, rough->smoothing_sigma);
      const auto [lo, hi] = std::minmax_element(noise_.begin(), noise_.end());
      const double low = *lo, span = *hi - *lo;
      for (double& n : noise_) n = span > 0.0 ? rough->amplitude * (n - low) / span : 0.0;
    }
  }

  bool covers(double u, double v) const {
    constexpr double eps = 1e-9;
    return std::abs(u) <= 0.5 * spec_.length + eps && std::abs(v) <= 0.5 * spec_.width + eps;
  }

  double height(double u, double v) const {
    const double s = std::clamp(u + 0.5 * spec_.length, 0.0, spec_.length);
    const double t = std::clamp(v + 0.5 * spec_.width, 0.0, spec_.width);
    return std::visit(
        [&](const auto& shape) -> double {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, Stairs>) {
            const int step = std::min(shape.n_steps, static_cast<int>(std::floor(s / shape.run_depth)) + 1);
            return step * shape.total_height / shape.n_steps;
          } else if constexpr (std::is_same_v<T, Wave>) {
            return 0.5 * shape.amplitude * (1.0 + std::cos(shape.period * u));
          } else if constexpr (std::is_same_v<T, Bricks>) {
            const int bx = std::min(bricks_x_ - 1, static_cast<int>(std::floor(s / shape.cell_size)));
            const int by = std::min(bricks_y_ - 1, static_cast<int>(std::floor(t / shape.cell_size)));
            return brick_levels_[static_cast<std::size_t>(by) * bricks_x_ + bx] * shape.height;
          } else if constexpr (std::is_same_v<T, Unstructured>) {
            const int ix = std::clamp(static_cast<int>(std::lround(s / resolution_)), 0, noise_x_ - 1);
            const int iy = std::clamp(static_cast<int>(std::lround(t / resolution_)), 0, noise_y_ - 1);
            return noise_[static_cast<std::size_t>(iy) * noise_x_ + ix];
          } else {
            return std::fmod(s, shape.width + shape.gap) < shape.width ? shape.height : 0.0;
          }
        },
        spec_.shape);
  }

 private:
  TerrainObjectSpec spec_;
  double resolution_;
  int bricks_x_ = 0, bricks_y_ = 0;
  std::vector<int> brick_levels_;
  int noise_x_ = 0, noise_y_ = 0;
  std::vector<double> noise_;
};

inline void stampObject(Heightfield& hf, const TerrainObjectSpec& spec, std::mt19937_64& rng) {
  const Pose2 pose{spec.offset, spec.yaw};
  for (const double su : {-0.5, 0.5})
    for (const double sv : {-0.5, 0.5}) {
      const Vec2 corner = pose.toWorld(Vec2(su * spec.length, sv * spec.width));
      if (!hf.contains(corner, 1e-6)) throw InvalidArgument("terrain object extends beyond the grid");
    }

  const ObjectProfile profile(spec, hf.resolution, rng);
  const double reach = 0.5 * std::hypot(spec.length, spec.width);
  const int c_lo = std::max(0, static_cast<int>(std::floor((spec.offset.x() - reach - hf.origin.x()) / hf.resolution)));
  const int c_hi = std::min(hf.cols - 1, static_cast<int>(std::ceil((spec.offset.x() + reach - hf.origin.x()) / hf.resolution)));
  const int r_lo = std::max(0, static_cast<int>(std::floor((spec.offset.y() - reach - hf.origin.y()) / hf.resolution)));
  const int r_hi = std::min(hf.rows - 1, static_cast<int>(std::ceil((spec.offset.y() + reach - hf.origin.y()) / hf.resolution)));
  for (int r = r_lo; r <= r_hi; ++r)
    for (int c = c_lo; c <= c_hi; ++c) {
      const Vec2 local = pose.toLocal(hf.cellPosition(r, c));
      if (profile.covers(local.x(), local.y())) hf.at(r, c) = hf.encode(profile.height(local.x(), local.y()));
    }
}

}  // namespace detail

/// World terrain (1001 x 1001 at 0.02 m, centred on the world origin) holding 1 to 5 objects.
/// Objects are stamped in order; overlapping cells take the value of the later object.
inline Heightfield generateTerrain(const std::vector<TerrainObjectSpec>& specs, std::uint64_t seed) {
  if (specs.empty() || specs.size() > 5) throw InvalidArgument("terrain needs between 1 and 5 objects");
  for (const auto& spec : specs) validate(spec);
  const double half = 0.5 * (kWorldCells - 1) * kGridResolution;
  Heightfield hf(kWorldCells, kWorldCells, kGridResolution, kDefaultZScale, Vec2(-half, -half));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto rng = detail::objectRng(seed, i);
    detail::stampObject(hf, specs[i], rng);
  }
  return hf;
}

inline constexpr double kEvalMinLength = 2.0;
inline constexpr double kEvalMaxLength = 3.6;

/// 5 x 5 m evaluation terrain with a single square object of side `length` at its centre.
inline Heightfield composeEvalTerrain(const TerrainShape& shape, double length, std::uint64_t seed) {
  if (!(length >= kEvalMinLength && length <= kEvalMaxLength))
    throw InvalidArgument("evaluation object length must lie in [2.0, 3.6] m");
  TerrainObjectSpec spec{shape, Vec2::Zero(), 0.0, length, length};
  validate(spec);
  const double half = 0.5 * (kEvalCells - 1) * kGridResolution;
  Heightfield hf(kEvalCells, kEvalCells, kGridResolution, kDefaultZScale, Vec2(-half, -half));
  auto rng = detail::objectRng(seed, 0);
  detail::stampObject(hf, spec, rng);
  return hf;
}

enum class TerrainKind { Stairs, Wave, Bricks, Unstructured, Planks };

/// Random evaluation object following the sweep distributions used for baseline comparison.
/// Returns the shape together with its footprint length.
inline std::pair<TerrainShape, double> sampleEvalObject(TerrainKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const double length = uniform(kEvalMinLength, kEvalMaxLength);
  switch (kind) {
    case TerrainKind::Stairs: {
      std::uniform_int_distribution<int> steps(3, 8);
      std::normal_distribution<double> height(0.3, 0.1);
      Stairs s;
      s.n_steps = steps(rng);
      s.total_height = std::clamp(height(rng), 0.25, 0.8);
      s.run_depth = length / (s.n_steps + 1);
      return {s, length};
    }
    case TerrainKind::Wave:
      return {Wave{uniform(0.05, 0.1), uniform(0.5 * kPi, kPi)}, length};
    case TerrainKind::Bricks:
      return {Bricks{0.10, uniform(0.02, 0.05)}, length};
    case TerrainKind::Unstructured:
      return {Unstructured{uniform(0.0125, 0.025), 3.0}, length};
    case TerrainKind::Planks:
      return {Planks{0.25, uniform(0.05, 0.15), 0.05}, length};
  }
  throw InvalidArgument("unknown terrain kind");
}

}  // namespace quadloco
