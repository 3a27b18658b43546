#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Core>

#include "quadloco/common.hpp"

namespace quadloco {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class PolicyKind { Recovery, Tracking, Footstep };

inline PolicyKind policyKindFromName(const std::string& name) {
  if (name == "recovery") return PolicyKind::Recovery;
  if (name == "tracking") return PolicyKind::Tracking;
  if (name == "footstep") return PolicyKind::Footstep;
  throw InvalidArgument("unknown policy kind '" + name + "'");
}

struct RandomizationConfig {
  double nominal_gravity = kStandardGravity;
  Range gravity_scale{0.96, 1.04};
  Range torque_scale_recovery{0.9, 1.1};
  Range torque_scale_tracking{0.85, 1.15};
  Range mass_scale{0.93, 1.07};
  Range size_scale{0.97, 1.05};
  Range damping_gain{0.8, 1.0};
  double force_sigma_recovery = 45.0;  // N, unclipped
  double force_sigma_other = 10.0;     // N
  double force_clip_other = 30.0;      // N
  Range force_duration{1.0, 4.0};      // s
  bool elevation_smoothing = true;
  double smoothing_probability = 0.5;
};

inline void validate(const RandomizationConfig& c) {
  for (const Range* r : {&c.gravity_scale, &c.torque_scale_recovery, &c.torque_scale_tracking, &c.mass_scale,
                         &c.size_scale, &c.damping_gain, &c.force_duration})
    require(r->lo <= r->hi, "randomization range lower bound exceeds upper bound");
  require(c.nominal_gravity > 0.0, "nominal gravity must be positive");
  require(c.force_sigma_recovery >= 0.0 && c.force_sigma_other >= 0.0 && c.force_clip_other >= 0.0,
          "force parameters must be non-negative");
  require(c.damping_gain.lo >= 0.0 && c.damping_gain.hi <= 1.0, "damping gain range must lie within [0, 1]");
  require(c.smoothing_probability >= 0.0 && c.smoothing_probability <= 1.0, "smoothing probability must lie in [0, 1]");
}

/// Reads `key = value` lines; ranges are written `lo, hi`. Unknown keys are errors.
inline RandomizationConfig parseRandomizationConfig(const std::string& text) {
  RandomizationConfig c;
  std::map<std::string, Range*> ranges{{"gravity_scale", &c.gravity_scale},
                                       {"torque_scale_recovery", &c.torque_scale_recovery},
                                       {"torque_scale_tracking", &c.torque_scale_tracking},
                                       {"mass_scale", &c.mass_scale},
                                       {"size_scale", &c.size_scale},
                                       {"damping_gain", &c.damping_gain},
                                       {"force_duration", &c.force_duration}};
  std::map<std::string, double*> scalars{{"nominal_gravity", &c.nominal_gravity},
                                         {"force_sigma_recovery", &c.force_sigma_recovery},
                                         {"force_sigma_other", &c.force_sigma_other},
                                         {"force_clip_other", &c.force_clip_other},
                                         {"smoothing_probability", &c.smoothing_probability}};
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (auto it = ranges.find(key); it != ranges.end()) {
        const auto comma = value.find(',');
        if (comma == std::string::npos) throw InvalidArgument("range '" + key + "' needs 'lo, hi'");
        it->second->lo = std::stod(value.substr(0, comma));
        it->second->hi = std::stod(value.substr(comma + 1));
      } else if (auto jt = scalars.find(key); jt != scalars.end()) {
        *jt->second = std::stod(value);
      } else if (key == "elevation_smoothing") {
        if (value != "true" && value != "false") throw InvalidArgument("elevation_smoothing must be true or false");
        c.elevation_smoothing = value == "true";
      } else {
        throw InvalidArgument("unknown randomization key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("malformed value for '" + key + "'");
    }
  }
  validate(c);
  return c;
}

struct RandomizationAssignment {
  double gravity = kStandardGravity;
  double torque_scale = 1.0;
  double mass_scale = 1.0;
  double size_scale = 1.0;
  double damping_gain = 1.0;
  Vec2 base_force = Vec2::Zero();  // frontal, lateral (N)
  double force_duration = 0.0;
  bool elevation_smoothing = false;
};

/// One draw per field. Recovery policies get unclipped N(0, 45^2) forces; tracking and
/// footstep policies get N(0, 10^2) clipped to +-30 N. Footstep policies keep unit torque scale.
inline RandomizationAssignment sampleRandomization(const RandomizationConfig& cfg, PolicyKind kind,
                                                   std::uint64_t seed) {
  validate(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](const Range& r) { return r.lo + (r.hi - r.lo) * unit(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  RandomizationAssignment a;
  a.gravity = cfg.nominal_gravity * uniform(cfg.gravity_scale);
  switch (kind) {
    case PolicyKind::Recovery: a.torque_scale = uniform(cfg.torque_scale_recovery); break;
    case PolicyKind::Tracking: a.torque_scale = uniform(cfg.torque_scale_tracking); break;
    case PolicyKind::Footstep: a.torque_scale = 1.0; break;
  }
  a.mass_scale = uniform(cfg.mass_scale);
  a.size_scale = uniform(cfg.size_scale);
  a.damping_gain = uniform(cfg.damping_gain);
  for (int axis = 0; axis < 2; ++axis) {
    if (kind == PolicyKind::Recovery) {
      a.base_force[axis] = cfg.force_sigma_recovery * gauss(rng);
    } else {
      a.base_force[axis] = std::clamp(cfg.force_sigma_other * gauss(rng), -cfg.force_clip_other, cfg.force_clip_other);
    }
  }
  a.force_duration = uniform(cfg.force_duration);
  a.elevation_smoothing = cfg.elevation_smoothing && unit(rng) < cfg.smoothing_probability;
  return a;
}

/// Complementary filter emulating actuator damping: J' = K J + (1 - K) J'_prev.
inline Eigen::VectorXd dampingFilter(const Eigen::VectorXd& current, const Eigen::VectorXd& previous_filtered,
                                     double gain, Range allowed = {0.8, 1.0}) {
  require(gain >= allowed.lo && gain <= allowed.hi, "damping gain outside its allowed range");
  require(current.size() == previous_filtered.size(), "joint vectors differ in size");
  return gain * current + (1.0 - gain) * previous_filtered;
}

}  // namespace quadloco
