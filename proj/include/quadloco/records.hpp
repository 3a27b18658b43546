#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "quadloco/common.hpp"
#include "quadloco/costmap.hpp"
#include "quadloco/stability.hpp"

namespace quadloco {

/// Table of numeric rows with named columns. By convention the last column is the label.
/// A label of -infinity marks an unbounded (unstable) stability margin.
struct RecordSet {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t width() const { return columns.size(); }
  std::size_t size() const { return rows.size(); }
  bool operator==(const RecordSet&) const = default;
};

inline constexpr std::string_view kUnboundedToken = "unbounded";

// ─── Actuator records ───────────────────────────────────────────────────────

/// One joint sample of the 400 Hz actuator stream.
struct ActuatorSample {
  double position_error = 0.0;   // measured - desired joint position
  double velocity_error = 0.0;   // measured - desired joint velocity
  double torque_error = 0.0;     // measured - desired feed-forward torque
  double desired_velocity = 0.0;
  double desired_torque = 0.0;
  double kp = 0.0;
  double kd = 0.0;
  double measured_torque = 0.0;
};

inline constexpr int kActuatorFeatures = 21;
inline constexpr double kActuatorRate = 400.0;

inline const std::vector<std::string>& actuatorColumns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    auto block = [&](const char* name, std::array<int, 3> lags) {
      for (int lag : lags) n.push_back(std::string(name) + (lag == 0 ? "_t" : "_t-" + std::to_string(lag)));
    };
    block("pos_err", {0, 4, 8});
    block("vel_err", {1, 5, 9});
    block("tau_err", {1, 5, 9});
    block("vel_des", {0, 4, 8});
    block("tau_des", {0, 4, 8});
    block("kp", {0, 4, 8});
    block("kd", {0, 4, 8});
    n.push_back("tau_measured");
    return n;
  }();
  return names;
}

/// Builds the 21-feature row (plus measured-torque label) at index `t` of a joint stream.
/// Positions use lags {0, 4, 8}; velocity and torque errors use {1, 5, 9}.
inline std::vector<double> actuatorRecord(const std::vector<ActuatorSample>& stream, std::size_t t) {
  require(t >= 9 && t < stream.size(), "actuator record needs nine samples of history");
  std::vector<double> row;
  row.reserve(kActuatorFeatures + 1);
  for (int lag : {0, 4, 8}) row.push_back(stream[t - lag].position_error);
  for (int lag : {1, 5, 9}) row.push_back(stream[t - lag].velocity_error);
  for (int lag : {1, 5, 9}) row.push_back(stream[t - lag].torque_error);
  for (int lag : {0, 4, 8}) row.push_back(stream[t - lag].desired_velocity);
  for (int lag : {0, 4, 8}) row.push_back(stream[t - lag].desired_torque);
  for (int lag : {0, 4, 8}) {
    require(stream[t - lag].kp > 0.0, "K_p must be positive");
    row.push_back(stream[t - lag].kp);
  }
  for (int lag : {0, 4, 8}) {
    require(stream[t - lag].kd > 0.0, "K_d must be positive");
    row.push_back(stream[t - lag].kd);
  }
  row.push_back(stream[t].measured_torque);
  return row;
}

inline RecordSet actuatorRecords(const std::vector<ActuatorSample>& stream) {
  RecordSet set{actuatorColumns(), {}};
  for (std::size_t t = 9; t < stream.size(); ++t) set.rows.push_back(actuatorRecord(stream, t));
  return set;
}

// ─── Stability records ──────────────────────────────────────────────────────

inline std::vector<std::string> stabilityColumns() {
  auto names = stabilityFeatureNames();
  names.push_back("margin");
  return names;
}

inline std::vector<double> toRow(const StabilityRecord& rec) {
  std::vector<double> row(rec.features.begin(), rec.features.end());
  row.push_back(rec.margin ? *rec.margin : -std::numeric_limits<double>::infinity());
  return row;
}

// ─── CSV ────────────────────────────────────────────────────────────────────

inline std::string formatNumber(double v) {
  if (std::isinf(v) && v < 0) return std::string(kUnboundedToken);
  if (!std::isfinite(v)) throw InvalidArgument("records may only hold finite values or the unbounded flag");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string writeCsv(const RecordSet& set) {
  for (const auto& row : set.rows)
    if (row.size() != set.width()) throw InvalidArgument("row width differs from column count");
  std::string out;
  for (std::size_t i = 0; i < set.columns.size(); ++i) {
    if (set.columns[i].find_first_of(",\"\n") != std::string::npos)
      throw InvalidArgument("column names may not contain commas, quotes or newlines");
    out += (i ? "," : "") + set.columns[i];
  }
  out += '\n';
  for (const auto& row : set.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += formatNumber(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> splitLine(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parseNumber(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  if (field == kUnboundedToken) return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v))
    throw IoError("malformed number '" + std::string(field) + "' on line " + std::to_string(line_no));
  return v;
}

}  // namespace detail

/// Parses a header-first CSV. When `expected_columns` is non-empty the header must match it.
inline RecordSet readCsv(std::string_view text, const std::vector<std::string>& expected_columns = {}) {
  RecordSet set;
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = detail::splitLine(line);
    if (header) {
      for (auto f : fields) set.columns.emplace_back(f);
      if (!expected_columns.empty() && set.columns != expected_columns)
        throw IoError("CSV header does not match the expected schema");
      header = false;
      continue;
    }
    if (fields.size() != set.columns.size())
      throw IoError("CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(set.columns.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(detail::parseNumber(f, line_no));
    set.rows.push_back(std::move(row));
  }
  if (header) throw IoError("CSV has no header row");
  return set;
}

/// Headerless grid: one line per row, row 0 first.
inline std::string gridCsv(const Grid2& grid) {
  std::string out;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out += ',';
      out += formatNumber(grid(r, c));
    }
    out += '\n';
  }
  return out;
}

inline Grid2 parseGridCsv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<double> row;
    for (auto f : detail::splitLine(line)) {
      row.push_back(detail::parseNumber(f, line_no));
      if (std::isinf(row.back())) throw IoError("grid values must be finite");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("grid line " + std::to_string(line_no) + " differs in width from the first row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("grid CSV is empty");
  Grid2 grid(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) grid(r, c) = rows[r][c];
  return grid;
}

}  // namespace quadloco
