#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "quadloco/common.hpp"
#include "quadloco/records.hpp"

namespace quadloco {

/// How rare each row's target is, and how the rare partition is rebalanced.
struct RelevanceSpec {
  enum class Method { BoxplotExtremes, HistogramRarity };
  Method method = Method::HistogramRarity;
  double threshold = 0.5;
  /// Columns forming the target; empty means the label (last) column.
  std::vector<int> target_columns;
  /// Histogram method: treat each distinct target tuple as its own bin.
  bool categorical = true;
  int bins = 10;
  int k_neighbors = 5;
  double noise_scale = 0.05;
  /// Desired rare:normal row ratio in the output.
  double rare_ratio = 1.0;
  /// Output size relative to the input size.
  double size_ratio = 1.0;
};

namespace detail {

inline std::vector<int> targetColumns(const RecordSet& set, const RelevanceSpec& spec) {
  std::vector<int> cols = spec.target_columns;
  if (cols.empty()) cols.push_back(static_cast<int>(set.width()) - 1);
  for (int c : cols) require(c >= 0 && c < static_cast<int>(set.width()), "target column out of range");
  return cols;
}

/// Linear-interpolation quantile of sorted data.
inline double quantileSorted(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

inline void checkNumeric(const RecordSet& set) {
  for (const auto& row : set.rows) {
    require(row.size() == set.width(), "row width differs from column count");
    for (double v : row) require(std::isfinite(v), "records must be finite numeric values");
  }
}

}  // namespace detail

/// Per-row relevance in [0, 1].
///  - boxplot extremes: linear ramp from 0 at the median to 1 at the adjacent values
///    (the most extreme points inside the 1.5 IQR fences), 1 beyond them;
///  - histogram rarity: 1 - count(bin) / max bin count.
inline std::vector<double> relevance(const RecordSet& set, const RelevanceSpec& spec) {
  require(set.size() >= 5, "relevance needs at least five rows");
  detail::checkNumeric(set);
  const auto cols = detail::targetColumns(set, spec);
  std::vector<double> rel(set.size(), 0.0);

  if (spec.method == RelevanceSpec::Method::BoxplotExtremes) {
    require(cols.size() == 1, "boxplot relevance needs a single target column");
    std::vector<double> y;
    for (const auto& row : set.rows) y.push_back(row[cols[0]]);
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    require(sorted.front() < sorted.back(), "target column is constant");
    const double median = detail::quantileSorted(sorted, 0.5);
    const double q1 = detail::quantileSorted(sorted, 0.25), q3 = detail::quantileSorted(sorted, 0.75);
    const double iqr = q3 - q1;
    double adj_lo = median, adj_hi = median;
    for (double v : sorted)
      if (v >= q1 - 1.5 * iqr) {
        adj_lo = std::min(v, median);
        break;
      }
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
      if (*it <= q3 + 1.5 * iqr) {
        adj_hi = std::max(*it, median);
        break;
      }
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double v = y[i];
      if (v >= median)
        rel[i] = adj_hi > median ? std::min(1.0, (v - median) / (adj_hi - median)) : (v > median ? 1.0 : 0.0);
      else
        rel[i] = adj_lo < median ? std::min(1.0, (median - v) / (median - adj_lo)) : 1.0;
    }
    return rel;
  }

  std::vector<std::vector<double>> keys(set.size());
  if (spec.categorical) {
    for (std::size_t i = 0; i < set.size(); ++i)
      for (int c : cols) keys[i].push_back(set.rows[i][c]);
  } else {
    require(cols.size() == 1, "binned histogram relevance needs a single target column");
    require(spec.bins >= 1, "histogram needs at least one bin");
    double lo = set.rows[0][cols[0]], hi = lo;
    for (const auto& row : set.rows) {
      lo = std::min(lo, row[cols[0]]);
      hi = std::max(hi, row[cols[0]]);
    }
    require(lo < hi, "target column is constant");
    for (std::size_t i = 0; i < set.size(); ++i) {
      const int bin = std::min(spec.bins - 1, static_cast<int>((set.rows[i][cols[0]] - lo) / (hi - lo) * spec.bins));
      keys[i] = {static_cast<double>(bin)};
    }
  }
  std::map<std::vector<double>, std::size_t> counts;
  for (const auto& k : keys) ++counts[k];
  require(counts.size() > 1, "target column is constant");
  std::size_t most = 0;
  for (const auto& [k, n] : counts) most = std::max(most, n);
  for (std::size_t i = 0; i < set.size(); ++i)
    rel[i] = 1.0 - static_cast<double>(counts[keys[i]]) / static_cast<double>(most);
  return rel;
}

struct Provenance {
  enum class Origin { Original, Interpolated, Noise };
  Origin origin = Origin::Original;
  std::size_t parent = 0;    // source row (original rows: their own index)
  std::size_t neighbor = 0;  // interpolation partner
  double lambda = 0.0;
};

struct ResampleResult {
  RecordSet records;
  std::vector<Provenance> provenance;  // one entry per output row
  std::vector<bool> rare;              // rare-partition membership of each output row
  std::size_t synthetic = 0;
};

/// Noise draws are truncated at this many standard deviations.
inline constexpr double kNoiseTruncation = 4.0;

/// SMOGN: uniform undersampling of normal rows plus synthetic rare rows. A synthetic row
/// interpolates toward one of its k nearest rare neighbours when that neighbour lies within
/// half the median rare-pair distance, and otherwise perturbs its seed with Gaussian noise
/// of `noise_scale` times each column's rare-partition standard deviation. Retained rows keep
/// their input order; synthetic rows follow.
inline ResampleResult smognResample(const RecordSet& set, const RelevanceSpec& spec, std::uint64_t seed) {
  require(spec.threshold > 0.0 && spec.threshold < 1.0, "relevance threshold must lie in (0, 1)");
  require(spec.k_neighbors >= 1, "k_neighbors must be at least one");
  require(spec.noise_scale >= 0.0 && spec.rare_ratio > 0.0 && spec.size_ratio > 0.0,
          "noise scale and ratios must be positive");
  const std::vector<double> rel = relevance(set, spec);
  std::vector<std::size_t> rare, normal;
  for (std::size_t i = 0; i < set.size(); ++i) (rel[i] >= spec.threshold ? rare : normal).push_back(i);

  std::mt19937_64 rng(seed);
  const auto n_out = static_cast<std::size_t>(std::llround(set.size() * spec.size_ratio));
  const double rare_share = spec.rare_ratio / (1.0 + spec.rare_ratio);
  const std::size_t rare_target = rare.empty() ? 0 : static_cast<std::size_t>(std::llround(n_out * rare_share));
  const std::size_t normal_target = std::min(
      normal.size(), rare.empty() ? n_out : n_out - std::min(n_out, rare_target));

  if (!rare.empty())
    require(rare.size() >= static_cast<std::size_t>(spec.k_neighbors) + 1,
            "rare partition needs at least k_neighbors + 1 rows");

  // Stable undersampling of the normal partition.
  std::vector<std::size_t> keep = normal;
  std::shuffle(keep.begin(), keep.end(), rng);
  keep.resize(normal_target);
  std::vector<bool> retained(set.size(), false);
  for (auto i : keep) retained[i] = true;
  for (auto i : rare) retained[i] = true;

  ResampleResult out;
  out.records.columns = set.columns;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!retained[i]) continue;
    out.records.rows.push_back(set.rows[i]);
    out.provenance.push_back({Provenance::Origin::Original, i, i, 0.0});
    out.rare.push_back(rel[i] >= spec.threshold);
  }

  const std::size_t n_synth = rare_target > rare.size() ? rare_target - rare.size() : 0;
  if (n_synth == 0) return out;

  const std::size_t width = set.width();
  const std::size_t label = width - 1;
  // Rare-partition standard deviation per column.
  std::vector<double> mean(width, 0.0), stdev(width, 0.0);
  for (auto i : rare)
    for (std::size_t c = 0; c < width; ++c) mean[c] += set.rows[i][c];
  for (auto& m : mean) m /= static_cast<double>(rare.size());
  for (auto i : rare)
    for (std::size_t c = 0; c < width; ++c) stdev[c] += std::pow(set.rows[i][c] - mean[c], 2);
  for (auto& s : stdev) s = std::sqrt(s / static_cast<double>(rare.size()));

  auto distance = [&](std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label) continue;
      const double scale = stdev[c] > 0.0 ? stdev[c] : 1.0;
      const double diff = (set.rows[a][c] - set.rows[b][c]) / scale;
      d += diff * diff;
    }
    return std::sqrt(d);
  };

  const std::size_t nr = rare.size();
  std::vector<double> dist(nr * nr, 0.0);
  for (std::size_t a = 0; a < nr; ++a)
    for (std::size_t b = a + 1; b < nr; ++b) dist[a * nr + b] = dist[b * nr + a] = distance(rare[a], rare[b]);
  std::vector<double> pairs;
  pairs.reserve(nr * (nr - 1) / 2);
  for (std::size_t a = 0; a < nr; ++a)
    for (std::size_t b = a + 1; b < nr; ++b) pairs.push_back(dist[a * nr + b]);
  std::nth_element(pairs.begin(), pairs.begin() + pairs.size() / 2, pairs.end());
  const double near_limit = 0.5 * pairs[pairs.size() / 2];

  const auto k = static_cast<std::size_t>(spec.k_neighbors);
  std::vector<std::vector<std::size_t>> neighbours(nr);
  auto knn = [&](std::size_t a) -> const std::vector<std::size_t>& {
    if (neighbours[a].empty()) {
      std::vector<std::size_t> order(nr);
      std::iota(order.begin(), order.end(), 0);
      order.erase(order.begin() + static_cast<std::ptrdiff_t>(a));
      std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                        [&](std::size_t x, std::size_t y) {
                          return dist[a * nr + x] < dist[a * nr + y] || (dist[a * nr + x] == dist[a * nr + y] && x < y);
                        });
      order.resize(k);
      neighbours[a] = std::move(order);
    }
    return neighbours[a];
  };

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto truncated = [&]() {
    double z;
    do z = gauss(rng);
    while (std::abs(z) > kNoiseTruncation);
    return z;
  };

  for (std::size_t s = 0; s < n_synth; ++s) {
    const std::size_t a = s % nr;
    const std::size_t b = knn(a)[pick(rng)];
    const auto& pa = set.rows[rare[a]];
    const auto& pb = set.rows[rare[b]];
    std::vector<double> row(width);
    Provenance prov{Provenance::Origin::Noise, rare[a], rare[b], 0.0};
    if (dist[a * nr + b] <= near_limit) {
      const double lambda = unit(rng);
      for (std::size_t c = 0; c < width; ++c) row[c] = pa[c] + lambda * (pb[c] - pa[c]);
      prov.origin = Provenance::Origin::Interpolated;
      prov.lambda = lambda;
    } else {
      for (std::size_t c = 0; c < width; ++c) row[c] = pa[c] + spec.noise_scale * stdev[c] * truncated();
    }
    out.records.rows.push_back(std::move(row));
    out.provenance.push_back(prov);
    out.rare.push_back(true);
    ++out.synthetic;
  }
  return out;
}

}  // namespace quadloco
