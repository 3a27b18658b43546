#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "quadloco/common.hpp"

namespace quadloco {

struct TrialRecord {
  double x = 0.0;
  double y = 0.0;
  bool success = false;
  std::string tag;
};

struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 11;

  std::vector<double> coordinates() const {
    std::vector<double> c(count);
    for (int i = 0; i < count; ++i) c[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return c;
  }
};

struct SuccessGrid {
  std::vector<double> xs, ys;
  /// values[iy * xs.size() + ix]; std::nullopt where the kernel weight is below the floor.
  std::vector<std::optional<double>> values;
  double bandwidth_x = 0.0, bandwidth_y = 0.0;

  const std::optional<double>& at(std::size_t ix, std::size_t iy) const { return values[iy * xs.size() + ix]; }
};

inline constexpr double kKdeWeightFloor = 1e-6;

/// Silverman's rule for a d-dimensional Gaussian product kernel: sigma * (4 / ((d + 2) n))^(1 / (d + 4)).
inline double silvermanBandwidth(const std::vector<double>& values, int dims = 2) {
  require(values.size() >= 2, "bandwidth estimation needs at least two samples");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sigma = std::sqrt(var / static_cast<double>(values.size() - 1));
  return sigma * std::pow(4.0 / ((dims + 2.0) * static_cast<double>(values.size())), 1.0 / (dims + 4.0));
}

/// Nadaraya-Watson estimate of the success probability with a Gaussian product kernel.
/// Bandwidths default to Silverman's rule per axis. Cells whose summed kernel weight falls
/// below `weight_floor` are left empty.
inline SuccessGrid kdeSuccessGrid(const std::vector<TrialRecord>& trials, const GridAxis& x_axis, const GridAxis& y_axis,
                                  std::optional<double> bandwidth_x = std::nullopt,
                                  std::optional<double> bandwidth_y = std::nullopt,
                                  double weight_floor = kKdeWeightFloor) {
  require(trials.size() >= 2, "KDE needs at least two trials");
  require(x_axis.count >= 1 && y_axis.count >= 1, "grid axes need at least one point");
  for (const auto& t : trials) require(std::isfinite(t.x) && std::isfinite(t.y), "trial parameters must be finite");

  SuccessGrid grid;
  if (bandwidth_x) {
    grid.bandwidth_x = *bandwidth_x;
  } else {
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.x);
    grid.bandwidth_x = silvermanBandwidth(v);
  }
  if (bandwidth_y) {
    grid.bandwidth_y = *bandwidth_y;
  } else {
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.y);
    grid.bandwidth_y = silvermanBandwidth(v);
  }
  require(grid.bandwidth_x > 0.0 && grid.bandwidth_y > 0.0, "KDE bandwidth must be positive");

  grid.xs = x_axis.coordinates();
  grid.ys = y_axis.coordinates();
  grid.values.resize(grid.xs.size() * grid.ys.size());
  for (std::size_t iy = 0; iy < grid.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      double total = 0.0, hits = 0.0;
      for (const auto& t : trials) {
        const double dx = (grid.xs[ix] - t.x) / grid.bandwidth_x;
        const double dy = (grid.ys[iy] - t.y) / grid.bandwidth_y;
        const double w = std::exp(-0.5 * (dx * dx + dy * dy));
        total += w;
        if (t.success) hits += w;
      }
      if (total >= weight_floor) grid.values[iy * grid.xs.size() + ix] = std::clamp(hits / total, 0.0, 1.0);
    }
  return grid;
}

/// Rows of "x,y,success_rate"; unsupported cells are written as "nodata".
inline std::string successGridCsv(const SuccessGrid& grid) {
  std::string out = "x,y,success_rate\n";
  char buf[96];
  for (std::size_t iy = 0; iy < grid.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      const auto& v = grid.at(ix, iy);
      if (v) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", grid.xs[ix], grid.ys[iy], *v);
      } else {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,nodata\n", grid.xs[ix], grid.ys[iy]);
      }
      out += buf;
    }
  return out;
}

/// Binary 8-bit PGM preview; row 0 is the largest y so the image reads like a plot.
/// Unsupported cells are black, success probability p maps to 1 + round(254 p).
inline std::vector<std::uint8_t> successGridPgm(const SuccessGrid& grid) {
  const std::string header =
      "P5\n" + std::to_string(grid.xs.size()) + " " + std::to_string(grid.ys.size()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (std::size_t r = 0; r < grid.ys.size(); ++r) {
    const std::size_t iy = grid.ys.size() - 1 - r;
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      const auto& v = grid.at(ix, iy);
      out.push_back(v ? static_cast<std::uint8_t>(1 + std::lround(254.0 * *v)) : 0);
    }
  }
  return out;
}

}  // namespace quadloco
