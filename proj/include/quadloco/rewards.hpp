#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "quadloco/common.hpp"

namespace quadloco {

/// K(x) = 1 / (e^x + 2 + e^-x); peaks at 0.25 for x = 0.
inline double logisticKernel(double x) {
  const double a = std::abs(x);
  // e^-a stays finite for large |x|; the form below is algebraically identical.
  const double e = std::exp(-a);
  return e / ((1.0 + e) * (1.0 + e));
}

using Joints = Eigen::Matrix<double, 12, 1>;
using FeetVec3 = std::array<Vec3, 4>;
using FeetVec2 = std::array<Vec2, 4>;

struct RobotSnapshot {
  Vec3 base_linear_velocity = Vec3::Zero();
  Vec3 base_angular_velocity = Vec3::Zero();
  Vec3 desired_linear_velocity = Vec3::Zero();
  Vec3 desired_angular_velocity = Vec3::Zero();
  Joints joint_positions = Joints::Zero();
  Joints previous_joint_positions = Joints::Zero();
  Joints joint_velocities = Joints::Zero();
  Joints joint_accelerations = Joints::Zero();
  Joints joint_torques = Joints::Zero();
  Joints joint_velocity_limits = Joints::Constant(12.0);
  Joints joint_acceleration_limits = Joints::Constant(1000.0);
  FeetVec3 foot_velocities{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  FeetVec3 previous_foot_velocities{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::array<double, 4> foot_heights{0.0, 0.0, 0.0, 0.0};
  double desired_foot_height = 0.0;
  FeetVec2 desired_footholds{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  FeetVec2 nominal_footholds{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  std::array<double, 4> edge_costs{0.0, 0.0, 0.0, 0.0};
  double stability_margin = 0.0;
};

inline void validate(const RobotSnapshot& s) {
  require((s.joint_velocity_limits.array() > 0.0).all(), "joint speed limits must be positive");
  require((s.joint_acceleration_limits.array() > 0.0).all(), "joint acceleration limits must be positive");
}

/// Footstep planner, per-step terms.
struct FootstepRecurrentWeights {
  double linear_velocity = 1.0;
  double torque = 1.0;
  double angular_velocity = 1.0;
  double foot_slip = 1.0;
  double stability = 1.0;
};

/// Footstep planner, end-of-swing-cycle terms.
struct FootstepFinalWeights {
  double nominal_deviation = 1.0;
  double edge_distance = 1.0;
  double foot_slip = 1.0;
  double stability = 1.0;
  double foot_height = 1.0;
};

struct RecoveryWeights {
  double linear_velocity = 1.0;
  double torque = 1.0;
  double angular_velocity = 1.0;
  double foot_acceleration = 1.0;
  double foot_slip = 1.0;
  double smoothness = 1.0;
  double stability = 1.0;
  double joint_speed = 1.0;
  double joint_acceleration = 1.0;
  double foot_clearance = 1.0;
};

/// Curriculum factor in [0, 1] scaling every penalty term (kernels and margin are unscaled).
struct Curriculum {
  double factor = 1.0;
};

namespace reward_terms {

inline double footSlip(const FeetVec3& v) {
  double s = 0.0;
  for (const auto& f : v) s += f.squaredNorm();
  return s;
}

inline double footAcceleration(const FeetVec3& now, const FeetVec3& before) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += (now[i] - before[i]).squaredNorm();
  return s;
}

inline double overLimit(const Joints& value, const Joints& limit) {
  return (value.cwiseAbs() - limit).cwiseMax(0.0).squaredNorm();
}

inline double footClearance(const RobotSnapshot& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double dh = s.foot_heights[i] - s.desired_foot_height;
    acc += dh * dh * s.foot_velocities[i].squaredNorm();
  }
  return acc;
}

inline double nominalDeviation(const RobotSnapshot& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) acc += (s.desired_footholds[i] - s.nominal_footholds[i]).squaredNorm();
  return acc;
}

inline double footHeightError(const RobotSnapshot& s) {
  double acc = 0.0;
  for (double h : s.foot_heights) acc += (s.desired_foot_height - h) * (s.desired_foot_height - h);
  return std::sqrt(acc);
}

}  // namespace reward_terms

inline void checkCurriculum(const Curriculum& c) {
  require(c.factor >= 0.0 && c.factor <= 1.0, "curriculum factor must lie in [0, 1]");
}

inline double footstepRecurrentReward(const RobotSnapshot& s, const FootstepRecurrentWeights& w,
                                      const Curriculum& curriculum = {}) {
  validate(s);
  checkCurriculum(curriculum);
  const double k = curriculum.factor;
  return w.linear_velocity * logisticKernel((s.base_linear_velocity - s.desired_linear_velocity).norm()) -
         k * w.torque * s.joint_torques.squaredNorm() +
         w.angular_velocity * logisticKernel((s.base_angular_velocity - s.desired_angular_velocity).norm()) -
         k * w.foot_slip * reward_terms::footSlip(s.foot_velocities) + w.stability * s.stability_margin;
}

inline double footstepFinalReward(const RobotSnapshot& s, const FootstepFinalWeights& w,
                                  const Curriculum& curriculum = {}) {
  validate(s);
  checkCurriculum(curriculum);
  const double k = curriculum.factor;
  double edges = 0.0;
  for (double c : s.edge_costs) edges += c;
  return -k * w.nominal_deviation * reward_terms::nominalDeviation(s) - k * w.edge_distance * edges -
         k * w.foot_slip * reward_terms::footSlip(s.foot_velocities) + w.stability * s.stability_margin +
         w.foot_height * logisticKernel(reward_terms::footHeightError(s));
}

inline double recoveryReward(const RobotSnapshot& s, const RecoveryWeights& w, const Curriculum& curriculum = {}) {
  validate(s);
  checkCurriculum(curriculum);
  const double k = curriculum.factor;
  return w.linear_velocity * logisticKernel((s.base_linear_velocity - s.desired_linear_velocity).norm()) -
         k * w.torque * s.joint_torques.squaredNorm() +
         w.angular_velocity * logisticKernel((s.base_angular_velocity - s.desired_angular_velocity).norm()) -
         k * w.foot_acceleration * reward_terms::footAcceleration(s.foot_velocities, s.previous_foot_velocities) -
         k * w.foot_slip * reward_terms::footSlip(s.foot_velocities) -
         k * w.smoothness * (s.joint_positions - s.previous_joint_positions).squaredNorm() +
         w.stability * s.stability_margin -
         k * w.joint_speed * reward_terms::overLimit(s.joint_velocities, s.joint_velocity_limits) -
         k * w.joint_acceleration * reward_terms::overLimit(s.joint_accelerations, s.joint_acceleration_limits) -
         k * w.foot_clearance * reward_terms::footClearance(s);
}

/// Weighted squared state-tracking error (negated) plus the stability-margin reward.
inline double trackingReward(const std::vector<double>& desired, const std::vector<double>& measured,
                             double stability_margin, const std::vector<double>& weights, double stability_weight = 1.0,
                             const Curriculum& curriculum = {}) {
  require(desired.size() == measured.size(), "desired and measured states differ in dimension");
  require(weights.size() == desired.size(), "tracking weights differ in dimension from the state");
  checkCurriculum(curriculum);
  double err = 0.0;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    const double e = desired[i] - measured[i];
    err += weights[i] * e * e;
  }
  return -curriculum.factor * err + stability_weight * stability_margin;
}

}  // namespace quadloco
