#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "quadloco/common.hpp"
#include "quadloco/costmap.hpp"
#include "quadloco/heightfield.hpp"
#include "quadloco/patch.hpp"

namespace quadloco {

/// Raised when rejection sampling runs out of attempts.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

struct FootholdWeights {
  double reference = 1.0;
  double previous = 0.0;
  double stabilization = 0.0;
};

/// Foothold planning query. All planar quantities share one frame (normally the world frame).
struct FootholdQuery {
  Pose2 base_pose;
  double base_height = 0.5;
  Vec2 base_velocity = Vec2::Zero();
  double base_yaw_rate = 0.0;
  Vec2 desired_velocity = Vec2::Zero();
  double desired_yaw_rate = 0.0;
  std::array<Vec2, 4> previous_footholds{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<Vec2, 4> hip_projections{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  double stance_duration = 0.5;
  double com_height = 0.5;
  double gravity = kStandardGravity;
  std::array<double, 4> kinematic_radius{0.2, 0.2, 0.2, 0.2};
  FootholdWeights weights;
};

inline void validate(const FootholdQuery& q) {
  require(q.stance_duration > 0.0, "stance duration must be positive");
  require(q.com_height > 0.0 && q.gravity > 0.0, "CoM height and gravity must be positive");
  for (double r : q.kinematic_radius) require(r > 0.0, "kinematic radius must be positive");
  const auto& w = q.weights;
  require(w.reference >= 0.0 && w.previous >= 0.0 && w.stabilization >= 0.0, "foothold weights must be non-negative");
  require(w.reference + w.previous + w.stabilization > 0.0, "foothold weights must not all be zero");
}

using Footholds = std::array<Vec2, 4>;

/// Hip projections of the nominal stance for a base pose, ordered LF, RF, LH, RH.
inline Footholds nominalHipProjections(const Pose2& base) {
  const std::array<Vec2, 4> offsets{Vec2(0.35, 0.20), Vec2(0.35, -0.20), Vec2(-0.35, 0.20), Vec2(-0.35, -0.20)};
  Footholds out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = base.toWorld(offsets[i]);
  return out;
}

/// Hip projection, advanced by half a stance at the commanded velocity, plus a capture-point
/// correction sqrt(h / g) * (v_base - v_desired).
inline Footholds referenceFootholds(const FootholdQuery& q) {
  validate(q);
  const Vec2 advance = q.desired_velocity * (0.5 * q.stance_duration);
  const Vec2 correction = std::sqrt(q.com_height / q.gravity) * (q.base_velocity - q.desired_velocity);
  Footholds out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = q.hip_projections[i] + advance + correction;
  return out;
}

/// Linear-inverted-pendulum stabilising target: hip projection plus the capture offset.
inline Footholds captureTargets(const FootholdQuery& q) {
  const Vec2 offset = std::sqrt(q.com_height / q.gravity) * q.base_velocity;
  Footholds out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = q.hip_projections[i] + offset;
  return out;
}

/// Per-foot QP  min w_ref|p - p_ref|^2 + w_prev|p - p_prev|^2 + w_stab|p - p_cap|^2
/// s.t. |p - hip| <= radius. The costs are isotropic, so the optimum is the weighted mean
/// projected radially onto the kinematic disc.
inline Footholds optimizeFootholds(const FootholdQuery& q) {
  validate(q);
  const Footholds ref = referenceFootholds(q);
  const Footholds cap = captureTargets(q);
  const auto& w = q.weights;
  const double total = w.reference + w.previous + w.stabilization;
  Footholds out;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 mean = (w.reference * ref[i] + w.previous * q.previous_footholds[i] + w.stabilization * cap[i]) / total;
    const Vec2 offset = mean - q.hip_projections[i];
    const double dist = offset.norm();
    out[i] = dist > q.kinematic_radius[i] ? Vec2(q.hip_projections[i] + offset * (q.kinematic_radius[i] / dist)) : mean;
  }
  return out;
}

// ─── Perceptive adjustment ──────────────────────────────────────────────────

inline constexpr double kPerceptiveRadius = 0.05;

struct PerceptiveWeights {
  double edge = 1.0;
  double slope = 1.0;
};

/// Central-difference slope magnitude of the patch at a local position.
inline double localSlope(const ElevationPatch& patch, const Vec2& p) {
  const double h = patch.resolution;
  const double gx = (patch.sample(p + Vec2(h, 0)) - patch.sample(p - Vec2(h, 0))) / (2 * h);
  const double gy = (patch.sample(p + Vec2(0, h)) - patch.sample(p - Vec2(0, h))) / (2 * h);
  return std::hypot(gx, gy);
}

inline double perceptiveCost(const ElevationPatch& patch, const Vec2& p, const PerceptiveWeights& w) {
  return w.edge * footEdgeCost(patch, p) + w.slope * localSlope(patch, p);
}

/// Moves a patch-local foothold by at most `radius` to the grid candidate with the lowest
/// edge-plus-slope cost. Ties prefer the smaller displacement, then smaller x, then smaller y.
inline Vec2 perceptiveAdjust(const Vec2& foothold, const ElevationPatch& patch, double radius = kPerceptiveRadius,
                             const PerceptiveWeights& weights = {}) {
  require(radius >= 0.0, "adjustment radius must be non-negative");
  const double reach = radius + kFootCostRadius;
  if (!patch.contains(foothold + Vec2(reach, reach)) || !patch.contains(foothold - Vec2(reach, reach)))
    throw OutOfExtent("foothold adjustment disc exits the elevation patch");

  const int steps = static_cast<int>(std::floor(radius / patch.resolution + 1e-9));
  Vec2 best = foothold;
  double best_cost = perceptiveCost(patch, foothold, weights);
  double best_disp = 0.0;
  for (int i = -steps; i <= steps; ++i)
    for (int j = -steps; j <= steps; ++j) {
      const Vec2 offset(i * patch.resolution, j * patch.resolution);
      const double disp = offset.norm();
      if (disp > radius + 1e-12 || (i == 0 && j == 0)) continue;
      const Vec2 cand = foothold + offset;
      const double cost = perceptiveCost(patch, cand, weights);
      const bool better = cost < best_cost ||
                          (cost == best_cost && (disp < best_disp || (disp == best_disp && (cand.x() < best.x() ||
                                                                          (cand.x() == best.x() && cand.y() < best.y())))));
      if (better) {
        best = cand;
        best_cost = cost;
        best_disp = disp;
      }
    }
  return best;
}

// ─── Swing trajectory ───────────────────────────────────────────────────────

inline constexpr double kSwingClearance = 0.05;

/// Three-node swing: start, apex, end. Planar motion is linear in the phase; height uses
/// cubic Hermite segments with zero vertical velocity at every node.
struct SwingSpline {
  std::array<Vec3, 3> nodes;

  Vec3 evaluate(double phase) const {
    phase = std::clamp(phase, 0.0, 1.0);
    Vec3 out;
    out.head<2>() = nodes[0].head<2>() + phase * (nodes[2].head<2>() - nodes[0].head<2>());
    const bool first = phase <= 0.5;
    const double s = first ? 2.0 * phase : 2.0 * phase - 1.0;
    const double z0 = first ? nodes[0].z() : nodes[1].z();
    const double z1 = first ? nodes[1].z() : nodes[2].z();
    const double blend = s * s * (3.0 - 2.0 * s);
    out.z() = z0 + (z1 - z0) * blend;
    return out;
  }
};

/// Apex above the segment midpoint at the highest terrain point along the segment plus
/// a 0.05 m margin (and never below either endpoint).
inline SwingSpline swingTrajectory(const Vec3& start, const Vec3& end, const Heightfield& hf,
                                   double clearance = kSwingClearance) {
  const double terrain = maxHeightOnSegment(hf, start.head<2>(), end.head<2>());
  SwingSpline s;
  s.nodes[0] = start;
  s.nodes[2] = end;
  s.nodes[1].head<2>() = 0.5 * (start.head<2>() + end.head<2>());
  s.nodes[1].z() = std::max({terrain + clearance, start.z(), end.z()});
  return s;
}

// ─── Velocity command gate ──────────────────────────────────────────────────

struct VelocityCommand {
  Vec2 linear = Vec2::Zero();  // base frame
  double yaw_rate = 0.0;
};

struct GateConfig {
  double threshold = 0.4;   // m
  double horizon = 0.4;     // s
  double recheck_period = 0.1;  // s; how often callers re-run the gate
};

struct GateDecision {
  bool accepted = true;
  double deviation = 0.0;  // max - min sampled height
};

/// Base position after `t` seconds of perfectly tracked constant body-frame velocity.
inline Vec2 integrateCommand(const Pose2& pose, const VelocityCommand& cmd, double t) {
  const double th0 = pose.yaw;
  double s, c;
  if (std::abs(cmd.yaw_rate) < 1e-12) {
    s = std::cos(th0) * t;
    c = std::sin(th0) * t;
  } else {
    const double th = th0 + cmd.yaw_rate * t;
    s = (std::sin(th) - std::sin(th0)) / cmd.yaw_rate;
    c = -(std::cos(th) - std::cos(th0)) / cmd.yaw_rate;
  }
  return pose.position + Vec2(s * cmd.linear.x() - c * cmd.linear.y(), c * cmd.linear.x() + s * cmd.linear.y());
}

/// Rejects a command when terrain height along the next `horizon` seconds of motion varies
/// by more than `threshold`. Samples are spaced at most one grid cell apart.
inline GateDecision velocityGate(const Heightfield& hf, const Pose2& pose, const VelocityCommand& cmd,
                                 const GateConfig& config = {}) {
  require(config.threshold > 0.0 && config.horizon > 0.0, "gate threshold and horizon must be positive");
  if (!hf.contains(pose.position)) throw OutOfExtent("gate pose outside terrain extent");
  const double speed = cmd.linear.norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(speed * config.horizon / (0.5 * hf.resolution))));
  double lo = heightAt(hf, pose.position), hi = lo;
  for (int i = 1; i <= steps; ++i) {
    const Vec2 p = integrateCommand(pose, cmd, config.horizon * i / steps);
    if (!hf.contains(p)) throw OutOfExtent("commanded path leaves the terrain extent");
    const double h = heightAt(hf, p);
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  return {hi - lo <= config.threshold, hi - lo};
}

struct CommandLimits {
  Vec2 vx{-1.0, 1.0};
  Vec2 vy{-0.5, 0.5};
  Vec2 yaw_rate{-1.0, 1.0};
  int max_attempts = 1000;
};

struct SampledCommand {
  VelocityCommand command;
  int attempts = 0;
};

/// Draws uniform commands within `limits` until one passes the gate.
inline SampledCommand resampleCommand(const Heightfield& hf, const Pose2& pose, std::uint64_t seed,
                                      const CommandLimits& limits = {}, const GateConfig& config = {}) {
  require(limits.vx.x() <= limits.vx.y() && limits.vy.x() <= limits.vy.y() &&
              limits.yaw_rate.x() <= limits.yaw_rate.y(),
          "command limits must be ordered ranges");
  require(limits.max_attempts > 0, "attempt budget must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const Vec2& range) { return range.x() + (range.y() - range.x()) * unit(rng); };
  for (int attempt = 1; attempt <= limits.max_attempts; ++attempt) {
    VelocityCommand cmd;
    cmd.linear = Vec2(draw(limits.vx), draw(limits.vy));
    cmd.yaw_rate = draw(limits.yaw_rate);
    try {
      if (velocityGate(hf, pose, cmd, config).accepted) return {cmd, attempt};
    } catch (const OutOfExtent&) {
      // Leaving the map counts as a rejection here.
    }
  }
  throw BudgetExhausted("no velocity command passed the terrain gate within the attempt budget");
}

// ─── Canned baseline planners ───────────────────────────────────────────────

enum class Gait { Trot, Crawl };

struct GaitConfig {
  Gait gait = Gait::Trot;
  double stance_duration = 0.5;
};

inline Gait gaitFromName(const std::string& name) {
  if (name == "trot") return Gait::Trot;
  if (name == "crawl") return Gait::Crawl;
  throw InvalidArgument("unknown gait '" + name + "'");
}

using Footholds3 = std::array<Vec3, 4>;

/// Blind baseline: optimised footholds with z read straight from the terrain.
inline Footholds3 blindPlan(const FootholdQuery& q, const Heightfield& hf) {
  const Footholds xy = optimizeFootholds(q);
  Footholds3 out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = Vec3(xy[i].x(), xy[i].y(), heightAt(hf, xy[i]));
  return out;
}

/// Perceptive baseline: blind plan followed by the edge/slope adjustment on a patch sliced
/// around the base.
inline Footholds3 perceptivePlan(const FootholdQuery& q, const Heightfield& hf,
                                 double radius = kPerceptiveRadius, const PerceptiveWeights& weights = {}) {
  const Footholds xy = optimizeFootholds(q);
  const ElevationPatch patch = slicePatch(hf, q.base_pose.position, q.base_pose.yaw);
  Footholds3 out;
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 local = patch.center_pose.toLocal(xy[i]);
    const Vec2 world = patch.center_pose.toWorld(perceptiveAdjust(local, patch, radius, weights));
    out[i] = Vec3(world.x(), world.y(), heightAt(hf, world));
  }
  return out;
}

}  // namespace quadloco
