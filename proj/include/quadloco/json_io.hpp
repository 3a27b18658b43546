#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadloco/analysis.hpp"
#include "quadloco/planner.hpp"
#include "quadloco/rewards.hpp"
#include "quadloco/stability.hpp"

// JSON forms of the query and result types. Infinite friction or force caps are written as
// null (or omitted) because JSON has no infinity.

namespace quadloco::json {

using nlohmann::json;

inline json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }
inline json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument("expected a 2-element array");
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

inline Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline double finiteOrInfinity(const json& j) {
  if (j.is_null()) return kInfinity;
  if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity")) return kInfinity;
  return j.get<double>();
}

inline json finiteOrNull(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

// ─── Stability ──────────────────────────────────────────────────────────────

inline json toJson(const Contact& c) {
  return {{"position", vec(c.position)},
          {"normal", vec(c.normal)},
          {"friction_mu", finiteOrNull(c.friction_mu)},
          {"active", c.active},
          {"f_max", finiteOrNull(c.f_max)}};
}

inline Contact contactFromJson(const json& j) {
  Contact c;
  c.position = vec3(j.at("position"));
  if (j.contains("normal")) c.normal = vec3(j.at("normal"));
  if (j.contains("friction_mu")) c.friction_mu = finiteOrInfinity(j.at("friction_mu"));
  c.active = j.value("active", true);
  if (j.contains("f_max")) c.f_max = finiteOrInfinity(j.at("f_max"));
  return c;
}

inline json toJson(const ContactSet& set) {
  json arr = json::array();
  for (const auto& c : set.contacts) arr.push_back(toJson(c));
  return {{"contacts", arr}};
}

inline ContactSet contactSetFromJson(const json& j) {
  const json& arr = j.is_array() ? j : j.at("contacts");
  ContactSet set;
  for (const auto& c : arr) set.contacts.push_back(contactFromJson(c));
  return set;
}

inline json toJson(const CentroidalState& s) {
  const auto& q = s.base_orientation;
  return {{"com_position", vec(s.com_position)},
          {"com_velocity", vec(s.com_velocity)},
          {"base_orientation", json::array({q.w(), q.x(), q.y(), q.z()})},
          {"angular_velocity", vec(s.angular_velocity)},
          {"angular_acceleration", vec(s.angular_acceleration)},
          {"external_force", vec(s.external_force)},
          {"external_torque", vec(s.external_torque)},
          {"mass", s.mass},
          {"gravity", s.gravity},
          {"inertia", json::array({json::array({s.inertia(0, 0), s.inertia(0, 1), s.inertia(0, 2)}),
                                   json::array({s.inertia(1, 0), s.inertia(1, 1), s.inertia(1, 2)}),
                                   json::array({s.inertia(2, 0), s.inertia(2, 1), s.inertia(2, 2)})})}};
}

inline CentroidalState stateFromJson(const json& j) {
  CentroidalState s;
  if (j.contains("com_position")) s.com_position = vec3(j["com_position"]);
  if (j.contains("com_velocity")) s.com_velocity = vec3(j["com_velocity"]);
  if (j.contains("base_orientation")) {
    const auto& q = j["base_orientation"];
    if (!q.is_array() || q.size() != 4) throw InvalidArgument("base_orientation must be [w, x, y, z]");
    s.base_orientation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  }
  if (j.contains("angular_velocity")) s.angular_velocity = vec3(j["angular_velocity"]);
  if (j.contains("angular_acceleration")) s.angular_acceleration = vec3(j["angular_acceleration"]);
  if (j.contains("external_force")) s.external_force = vec3(j["external_force"]);
  if (j.contains("external_torque")) s.external_torque = vec3(j["external_torque"]);
  s.mass = j.value("mass", s.mass);
  s.gravity = j.value("gravity", s.gravity);
  if (j.contains("inertia")) {
    const auto& m = j["inertia"];
    if (m.is_array() && m.size() == 3 && m[0].is_number()) {
      s.inertia = Eigen::Vector3d(m[0].get<double>(), m[1].get<double>(), m[2].get<double>()).asDiagonal();
    } else {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) s.inertia(r, c) = m.at(r).at(c).get<double>();
    }
  }
  return s;
}

inline json toJson(const FeasibleRegion& r) {
  json verts = json::array(), outer = json::array();
  for (const auto& v : r.vertices) verts.push_back(vec(v));
  for (const auto& v : r.outer_vertices) outer.push_back(vec(v));
  return {{"kind", kindName(r.kind)},
          {"vertices", verts},
          {"outer_vertices", outer},
          {"achieved_tolerance", r.achieved_tolerance},
          {"lp_calls", r.lp_calls},
          {"refinements", r.refinements}};
}

inline json toJson(const MarginResult& m) {
  return {{"margin", m.margin ? json(*m.margin) : json(nullptr)},
          {"unbounded", m.unbounded()},
          {"icp", vec(m.icp)},
          {"region", toJson(m.region)}};
}

// ─── Planner ────────────────────────────────────────────────────────────────

template <std::size_t N>
std::array<Vec2, N> vec2Array(const json& j) {
  if (!j.is_array() || j.size() != N) throw InvalidArgument("expected " + std::to_string(N) + " planar points");
  std::array<Vec2, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = vec2(j[i]);
  return out;
}

inline FootholdQuery footholdQueryFromJson(const json& j) {
  FootholdQuery q;
  if (j.contains("base_pose")) {
    const auto& p = j["base_pose"];
    q.base_pose.position = vec2(p.at("position"));
    q.base_pose.yaw = p.value("yaw", 0.0);
  }
  q.base_height = j.value("base_height", q.base_height);
  if (j.contains("base_velocity")) q.base_velocity = vec2(j["base_velocity"]);
  q.base_yaw_rate = j.value("base_yaw_rate", 0.0);
  if (j.contains("desired_velocity")) q.desired_velocity = vec2(j["desired_velocity"]);
  q.desired_yaw_rate = j.value("desired_yaw_rate", 0.0);
  q.hip_projections = j.contains("hip_projections") ? vec2Array<4>(j["hip_projections"])
                                                     : nominalHipProjections(q.base_pose);
  q.previous_footholds = j.contains("previous_footholds") ? vec2Array<4>(j["previous_footholds"]) : q.hip_projections;
  q.stance_duration = j.value("stance_duration", q.stance_duration);
  q.com_height = j.value("com_height", q.com_height);
  q.gravity = j.value("gravity", q.gravity);
  if (j.contains("kinematic_radius")) {
    const auto& r = j["kinematic_radius"];
    if (r.is_number()) {
      q.kinematic_radius.fill(r.get<double>());
    } else {
      for (std::size_t i = 0; i < 4; ++i) q.kinematic_radius[i] = r.at(i).get<double>();
    }
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    q.weights.reference = w.value("reference", q.weights.reference);
    q.weights.previous = w.value("previous", q.weights.previous);
    q.weights.stabilization = w.value("stabilization", q.weights.stabilization);
  }
  return q;
}

// ─── Rewards ────────────────────────────────────────────────────────────────

inline Joints joints(const json& j) {
  if (!j.is_array() || j.size() != 12) throw InvalidArgument("joint vectors need 12 entries");
  Joints out;
  for (int i = 0; i < 12; ++i) out(i) = j[i].get<double>();
  return out;
}

inline FeetVec3 feet3(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InvalidArgument("expected four foot vectors");
  FeetVec3 out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = vec3(j[i]);
  return out;
}

inline std::array<double, 4> four(const json& j) {
  if (!j.is_array() || j.size() != 4) throw InvalidArgument("expected four per-foot values");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline RobotSnapshot snapshotFromJson(const json& j) {
  RobotSnapshot s;
  if (j.contains("base_linear_velocity")) s.base_linear_velocity = vec3(j["base_linear_velocity"]);
  if (j.contains("base_angular_velocity")) s.base_angular_velocity = vec3(j["base_angular_velocity"]);
  if (j.contains("desired_linear_velocity")) s.desired_linear_velocity = vec3(j["desired_linear_velocity"]);
  if (j.contains("desired_angular_velocity")) s.desired_angular_velocity = vec3(j["desired_angular_velocity"]);
  if (j.contains("joint_positions")) s.joint_positions = joints(j["joint_positions"]);
  if (j.contains("previous_joint_positions")) s.previous_joint_positions = joints(j["previous_joint_positions"]);
  if (j.contains("joint_velocities")) s.joint_velocities = joints(j["joint_velocities"]);
  if (j.contains("joint_accelerations")) s.joint_accelerations = joints(j["joint_accelerations"]);
  if (j.contains("joint_torques")) s.joint_torques = joints(j["joint_torques"]);
  if (j.contains("joint_velocity_limits")) s.joint_velocity_limits = joints(j["joint_velocity_limits"]);
  if (j.contains("joint_acceleration_limits")) s.joint_acceleration_limits = joints(j["joint_acceleration_limits"]);
  if (j.contains("foot_velocities")) s.foot_velocities = feet3(j["foot_velocities"]);
  if (j.contains("previous_foot_velocities")) s.previous_foot_velocities = feet3(j["previous_foot_velocities"]);
  if (j.contains("foot_heights")) s.foot_heights = four(j["foot_heights"]);
  s.desired_foot_height = j.value("desired_foot_height", 0.0);
  if (j.contains("desired_footholds")) s.desired_footholds = vec2Array<4>(j["desired_footholds"]);
  if (j.contains("nominal_footholds")) s.nominal_footholds = vec2Array<4>(j["nominal_footholds"]);
  if (j.contains("edge_costs")) s.edge_costs = four(j["edge_costs"]);
  s.stability_margin = j.value("stability_margin", 0.0);
  return s;
}

inline FootstepRecurrentWeights recurrentWeightsFromJson(const json& j) {
  FootstepRecurrentWeights w;
  w.linear_velocity = j.value("linear_velocity", w.linear_velocity);
  w.torque = j.value("torque", w.torque);
  w.angular_velocity = j.value("angular_velocity", w.angular_velocity);
  w.foot_slip = j.value("foot_slip", w.foot_slip);
  w.stability = j.value("stability", w.stability);
  return w;
}

inline FootstepFinalWeights finalWeightsFromJson(const json& j) {
  FootstepFinalWeights w;
  w.nominal_deviation = j.value("nominal_deviation", w.nominal_deviation);
  w.edge_distance = j.value("edge_distance", w.edge_distance);
  w.foot_slip = j.value("foot_slip", w.foot_slip);
  w.stability = j.value("stability", w.stability);
  w.foot_height = j.value("foot_height", w.foot_height);
  return w;
}

inline RecoveryWeights recoveryWeightsFromJson(const json& j) {
  RecoveryWeights w;
  w.linear_velocity = j.value("linear_velocity", w.linear_velocity);
  w.torque = j.value("torque", w.torque);
  w.angular_velocity = j.value("angular_velocity", w.angular_velocity);
  w.foot_acceleration = j.value("foot_acceleration", w.foot_acceleration);
  w.foot_slip = j.value("foot_slip", w.foot_slip);
  w.smoothness = j.value("smoothness", w.smoothness);
  w.stability = j.value("stability", w.stability);
  w.joint_speed = j.value("joint_speed", w.joint_speed);
  w.joint_acceleration = j.value("joint_acceleration", w.joint_acceleration);
  w.foot_clearance = j.value("foot_clearance", w.foot_clearance);
  return w;
}

}  // namespace quadloco::json
