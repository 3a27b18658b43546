#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadloco/common.hpp"
#include "quadloco/geometry.hpp"
#include "quadloco/lp.hpp"

namespace quadloco {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Point contact. `f_max` caps the normal force and stands in for the joint-torque
/// limits of the leg; use +infinity for an unlimited contact.
struct Contact {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double friction_mu = 0.6;
  bool active = true;
  double f_max = kInfinity;
};

struct ContactSet {
  std::vector<Contact> contacts;

  std::vector<const Contact*> active() const {
    std::vector<const Contact*> out;
    for (const auto& c : contacts)
      if (c.active) out.push_back(&c);
    return out;
  }
};

struct CentroidalState {
  Vec3 com_position = Vec3(0.0, 0.0, 0.5);
  Vec3 com_velocity = Vec3::Zero();
  Eigen::Quaterniond base_orientation = Eigen::Quaterniond::Identity();
  Vec3 angular_velocity = Vec3::Zero();      // world frame
  Vec3 angular_acceleration = Vec3::Zero();  // world frame
  Vec3 external_force = Vec3::Zero();
  Vec3 external_torque = Vec3::Zero();
  double mass = 30.0;
  double gravity = kStandardGravity;
  /// Body-frame rotational inertia about the CoM.
  Eigen::Matrix3d inertia = Eigen::Vector3d(0.27, 0.97, 1.09).asDiagonal();
};

inline void validate(const CentroidalState& s) {
  require(s.mass > 0.0, "mass must be positive");
  require(s.gravity > 0.0, "gravity must be positive");
  require(std::abs(s.base_orientation.norm() - 1.0) < 1e-6, "base orientation must be a unit quaternion");
}

inline void validate(const ContactSet& set) {
  require(set.contacts.size() <= 4, "at most four contacts are supported");
  for (const auto& c : set.contacts) {
    require(std::abs(c.normal.norm() - 1.0) <= 1e-9, "contact normal must be unit length");
    require(c.friction_mu >= 0.0, "friction coefficient must be non-negative");
    require(c.f_max > 0.0, "contact force cap must be positive");
  }
  const auto act = set.active();
  require(!act.empty(), "at least one active contact is required");
  for (std::size_t i = 0; i < act.size(); ++i)
    for (std::size_t j = i + 1; j < act.size(); ++j)
      require((act[i]->position - act[j]->position).norm() > 1e-9, "contact positions must be distinct");
}

/// Height of the CoM over the mean height of the active contacts.
inline double comHeightAboveContacts(const CentroidalState& state, const ContactSet& contacts) {
  const auto act = contacts.active();
  require(!act.empty(), "at least one active contact is required");
  double z = 0.0;
  for (const auto* c : act) z += c->position.z();
  return state.com_position.z() - z / static_cast<double>(act.size());
}

/// Instantaneous capture point x_com + v_com * sqrt(h / g), with h the CoM height above
/// the contact reference plane.
inline Vec2 instantaneousCapturePoint(const CentroidalState& state, double height) {
  require(height > 0.0, "CoM height above the contact plane must be positive");
  require(state.gravity > 0.0, "gravity must be positive");
  return state.com_position.head<2>() + state.com_velocity.head<2>() * std::sqrt(height / state.gravity);
}

inline Vec2 instantaneousCapturePoint(const CentroidalState& state, const ContactSet& contacts) {
  return instantaneousCapturePoint(state, comHeightAboveContacts(state, contacts));
}

struct RegionOptions {
  int friction_edges = 4;
  int max_refinements = 500;
  lp::Options lp;
};

struct SupportResult {
  bool feasible = false;
  Vec2 point = Vec2::Zero();
};

/// Contact-force equilibrium for a CoM position (x, y, com_z):
///   sum f_i = -(m g + F_ext),  sum p_i x f_i + c x (m g + F_ext) + tau_ext - dL/dt = 0,
/// friction pyramids about each normal and 0 <= f_i . n_i <= f_max. Forces are scaled by m g.
class EquilibriumProblem {
 public:
  EquilibriumProblem(const ContactSet& contacts, const CentroidalState& state, const RegionOptions& options = {})
      : options_(options) {
    validate(state);
    validate(contacts);
    require(options.friction_edges >= 3, "friction pyramid needs at least three edges");

    const auto act = contacts.active();
    anchor_ = Vec3::Zero();
    for (const auto* c : act) anchor_ += c->position;
    anchor_ /= static_cast<double>(act.size());

    const double weight = state.mass * state.gravity;
    const Vec3 wrench_force = (Vec3(0.0, 0.0, -weight) + state.external_force) / weight;
    const Eigen::Matrix3d rot = state.base_orientation.toRotationMatrix();
    const Eigen::Matrix3d inertia = rot * state.inertia * rot.transpose();
    const Vec3 momentum_rate =
        inertia * state.angular_acceleration + state.angular_velocity.cross(inertia * state.angular_velocity);
    const Vec3 torque = (state.external_torque - momentum_rate) / weight;
    const double h = state.com_position.z() - anchor_.z();

    // Force generators per contact.
    std::vector<Vec3> columns_force, columns_moment;
    std::vector<int> owner;
    std::vector<double> normal_part;
    for (std::size_t ci = 0; ci < act.size(); ++ci) {
      const Contact& c = *act[ci];
      const Vec3 p = c.position - anchor_;
      const Vec3 n = c.normal;
      const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 t1 = n.cross(helper).normalized();
      const Vec3 t2 = n.cross(t1);
      auto push = [&](const Vec3& g, double normal_component) {
        columns_force.push_back(g);
        columns_moment.push_back(p.cross(g));
        owner.push_back(static_cast<int>(ci));
        normal_part.push_back(normal_component);
      };
      if (c.friction_mu == 0.0) {
        push(n, 1.0);
      } else if (std::isinf(c.friction_mu)) {
        push(n, 1.0);
        for (const Vec3& t : {t1, Vec3(-t1), t2, Vec3(-t2)}) push(t, 0.0);
      } else {
        for (int k = 0; k < options.friction_edges; ++k) {
          const double a = 2.0 * kPi * k / options.friction_edges;
          push(n + c.friction_mu * (std::cos(a) * t1 + std::sin(a) * t2), 1.0);
        }
      }
    }

    const int nf = static_cast<int>(columns_force.size());
    num_force_vars_ = nf;
    lp_ = lp::LinearProgram(nf + 4);
    lp_.a_eq = Eigen::MatrixXd::Zero(6, nf + 4);
    lp_.b_eq = Eigen::VectorXd::Zero(6);
    for (int k = 0; k < nf; ++k) {
      lp_.a_eq.block<3, 1>(0, k) = columns_force[k];
      lp_.a_eq.block<3, 1>(3, k) = columns_moment[k];
    }
    const Vec3& w = wrench_force;
    // Reference point columns: x = x+ - x-, y = y+ - y-.
    const Eigen::Matrix<double, 6, 1> x_col = (Eigen::Matrix<double, 6, 1>() << 0, 0, 0, 0, -w.z(), w.y()).finished();
    const Eigen::Matrix<double, 6, 1> y_col = (Eigen::Matrix<double, 6, 1>() << 0, 0, 0, w.z(), 0, -w.x()).finished();
    lp_.a_eq.col(nf) = x_col;
    lp_.a_eq.col(nf + 1) = -x_col;
    lp_.a_eq.col(nf + 2) = y_col;
    lp_.a_eq.col(nf + 3) = -y_col;
    lp_.b_eq.head<3>() = -w;
    lp_.b_eq(3) = h * w.y() - torque.x();
    lp_.b_eq(4) = -h * w.x() - torque.y();
    lp_.b_eq(5) = -torque.z();

    std::vector<int> capped;
    for (std::size_t ci = 0; ci < act.size(); ++ci)
      if (std::isfinite(act[ci]->f_max)) capped.push_back(static_cast<int>(ci));
    lp_.a_le = Eigen::MatrixXd::Zero(static_cast<int>(capped.size()), nf + 4);
    lp_.b_le = Eigen::VectorXd::Zero(static_cast<int>(capped.size()));
    for (std::size_t r = 0; r < capped.size(); ++r) {
      for (int k = 0; k < nf; ++k)
        if (owner[k] == capped[r]) lp_.a_le(static_cast<int>(r), k) = normal_part[k];
      lp_.b_le(static_cast<int>(r)) = act[capped[r]]->f_max / weight;
    }
  }

  /// Maximises direction . (x, y) over admissible reference points.
  SupportResult support(const Vec2& direction) const {
    require(direction.norm() > 0.0, "support direction must be nonzero");
    lp::LinearProgram problem = lp_;
    const int nf = num_force_vars_;
    problem.objective.setZero();
    problem.objective(nf) = direction.x();
    problem.objective(nf + 1) = -direction.x();
    problem.objective(nf + 2) = direction.y();
    problem.objective(nf + 3) = -direction.y();
    ++lp_calls_;
    const lp::Solution sol = lp::Simplex(options_.lp).solve(problem);
    switch (sol.status) {
      case lp::Status::Infeasible:
        return {false, Vec2::Zero()};
      case lp::Status::Unbounded:
        throw NumericalFailure("support LP unbounded: feasible region is not bounded");
      case lp::Status::IterationLimit:
        throw NumericalFailure("support LP hit the iteration limit");
      case lp::Status::Optimal:
        break;
    }
    return {true, Vec2(sol.x(nf) - sol.x(nf + 1) + anchor_.x(), sol.x(nf + 2) - sol.x(nf + 3) + anchor_.y())};
  }

  int lpCalls() const { return lp_calls_; }
  const lp::LinearProgram& program() const { return lp_; }
  Vec3 anchor() const { return anchor_; }

 private:
  RegionOptions options_;
  Vec3 anchor_;
  lp::LinearProgram lp_;
  int num_force_vars_ = 0;
  mutable int lp_calls_ = 0;
};

inline SupportResult supportLp(const ContactSet& contacts, const CentroidalState& state, const Vec2& direction,
                               const RegionOptions& options = {}) {
  return EquilibriumProblem(contacts, state, options).support(direction);
}

struct FeasibleRegion {
  enum class Kind { Polygon, Segment, Point, Empty };
  Kind kind = Kind::Empty;
  /// Polygon: inner approximation (CCW). Segment: two endpoints. Point: one point.
  std::vector<Vec2> vertices;
  /// Polygon only: outer approximation (CCW).
  std::vector<Vec2> outer_vertices;
  double achieved_tolerance = 0.0;
  int lp_calls = 0;
  int refinements = 0;
};

inline std::string kindName(FeasibleRegion::Kind kind) {
  switch (kind) {
    case FeasibleRegion::Kind::Polygon: return "polygon";
    case FeasibleRegion::Kind::Segment: return "segment";
    case FeasibleRegion::Kind::Point: return "point";
    case FeasibleRegion::Kind::Empty: return "empty";
  }
  return "empty";
}

inline constexpr double kDefaultRegionTolerance = 0.01;

namespace detail {

struct SupportSample {
  double angle;
  Vec2 direction;
  Vec2 point;
  double offset;
};

inline double wrapAngle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

struct GapInfo {
  double height = 0.0;
  double area = 0.0;
  Vec2 outer = Vec2::Zero();
};

inline GapInfo gapBetween(const SupportSample& a, const SupportSample& b) {
  GapInfo g;
  const double span = wrapAngle(b.angle - a.angle);
  if (span < 1e-9) {
    g.outer = a.point;
    return g;
  }
  if (span >= kPi - 1e-9 || !geometry::intersectLines(a.direction, a.offset, b.direction, b.offset, g.outer)) {
    g.height = g.area = kInfinity;
    g.outer = 0.5 * (a.point + b.point);
    return g;
  }
  g.height = geometry::distanceToSegment(g.outer, a.point, b.point);
  g.area = 0.5 * std::abs(geometry::cross(b.point - a.point, g.outer - a.point));
  return g;
}

inline bool strictlyBetween(double angle, double from, double to) {
  const double span = wrapAngle(to - from);
  const double rel = wrapAngle(angle - from);
  return rel > 1e-9 && rel < span - 1e-9;
}

inline FeasibleRegion iterativeProjection(const EquilibriumProblem& problem, double tolerance, int max_refinements) {
  FeasibleRegion region;
  std::vector<SupportSample> samples;
  auto query = [&](double angle) -> bool {
    const Vec2 d(std::cos(angle), std::sin(angle));
    const SupportResult r = problem.support(d);
    if (!r.feasible) return false;
    SupportSample s{wrapAngle(angle), d, r.point, d.dot(r.point)};
    samples.insert(std::upper_bound(samples.begin(), samples.end(), s,
                                    [](const SupportSample& x, const SupportSample& y) { return x.angle < y.angle; }),
                   s);
    return true;
  };

  if (!query(0.0)) return region;  // Empty
  if (!query(2.0 * kPi / 3.0) || !query(4.0 * kPi / 3.0))
    throw NumericalFailure("support LP infeasible after a feasible direction");

  double worst = kInfinity;
  while (true) {
    const std::size_t n = samples.size();
    std::size_t pick = n;
    double best_area = -1.0;
    worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const GapInfo g = gapBetween(samples[i], samples[(i + 1) % n]);
      worst = std::max(worst, g.height);
      if (g.height > tolerance && g.area > best_area) {
        best_area = g.area;
        pick = i;
      }
    }
    if (pick == n || region.refinements >= max_refinements) break;

    const SupportSample& a = samples[pick];
    const SupportSample& b = samples[(pick + 1) % n];
    const Vec2 edge = b.point - a.point;
    double angle;
    if (edge.norm() > 1e-12) {
      angle = wrapAngle(std::atan2(-edge.x(), edge.y()));
      if (!strictlyBetween(angle, a.angle, b.angle)) angle = wrapAngle(a.angle + 0.5 * wrapAngle(b.angle - a.angle));
    } else {
      angle = wrapAngle(a.angle + 0.5 * wrapAngle(b.angle - a.angle));
    }
    if (!query(angle)) throw NumericalFailure("support LP infeasible after a feasible direction");
    ++region.refinements;
  }

  std::vector<Vec2> inner, outer;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    inner.push_back(samples[i].point);
    outer.push_back(gapBetween(samples[i], samples[(i + 1) % samples.size()]).outer);
    outer.push_back(samples[(i + 1) % samples.size()].point);
  }
  region.vertices = geometry::convexHull(inner, 1e-12);
  region.outer_vertices = geometry::convexHull(outer, 1e-12);
  region.achieved_tolerance = worst;
  region.kind = FeasibleRegion::Kind::Polygon;
  return region;
}

}  // namespace detail

/// Admissible CoM positions (at the current CoM height) for which contact forces exist.
/// Three or more non-collinear active contacts give a Polygon refined by iterative
/// projection until every outer vertex is within `tolerance` of the inner polygon; collinear
/// or two contacts give a Segment; one contact a Point.
inline FeasibleRegion feasibleRegion(const ContactSet& contacts, const CentroidalState& state,
                                     double tolerance = kDefaultRegionTolerance, const RegionOptions& options = {}) {
  require(tolerance > 0.0, "region tolerance must be positive");
  const EquilibriumProblem problem(contacts, state, options);
  const auto act = contacts.active();

  std::vector<Vec2> xy;
  for (const auto* c : act) xy.push_back(c->position.head<2>());
  const auto hull = geometry::convexHull(xy, 1e-9);

  FeasibleRegion region;
  if (hull.size() >= 3) {
    region = detail::iterativeProjection(problem, tolerance, options.max_refinements);
    if (region.kind == FeasibleRegion::Kind::Polygon && region.vertices.size() < 3) {
      // Region collapsed although the contacts span an area.
      if (region.vertices.size() == 2) {
        region.kind = FeasibleRegion::Kind::Segment;
      } else {
        region.kind = FeasibleRegion::Kind::Point;
      }
      region.outer_vertices.clear();
    }
  } else if (act.size() == 1 || hull.size() == 1) {
    const SupportResult r = problem.support(Vec2::UnitX());
    if (r.feasible) {
      region.kind = FeasibleRegion::Kind::Point;
      region.vertices = {r.point};
    }
  } else {
    const Vec2 axis = (hull[1] - hull[0]).normalized();
    const SupportResult hi = problem.support(axis);
    if (hi.feasible) {
      const SupportResult lo = problem.support(-axis);
      if (!lo.feasible) throw NumericalFailure("support LP infeasible after a feasible direction");
      if ((hi.point - lo.point).norm() <= 1e-12) {
        region.kind = FeasibleRegion::Kind::Point;
        region.vertices = {hi.point};
      } else {
        region.kind = FeasibleRegion::Kind::Segment;
        region.vertices = {lo.point, hi.point};
      }
    }
  }
  region.lp_calls = problem.lpCalls();
  return region;
}

/// Positive strictly inside a Polygon, zero on its boundary, negative outside.
/// Segment and Point regions have no interior, so the result is never positive.
inline double signedDistance(const Vec2& p, const FeasibleRegion& region) {
  switch (region.kind) {
    case FeasibleRegion::Kind::Polygon:
      return geometry::signedDistanceConvex(p, region.vertices);
    case FeasibleRegion::Kind::Segment:
      return -geometry::distanceToSegment(p, region.vertices[0], region.vertices[1]);
    case FeasibleRegion::Kind::Point:
      return -(p - region.vertices[0]).norm();
    case FeasibleRegion::Kind::Empty:
      break;
  }
  throw InvalidArgument("signed distance to an empty region is undefined");
}

struct MarginResult {
  /// Empty when the region is empty (unstable, unbounded margin).
  std::optional<double> margin;
  Vec2 icp = Vec2::Zero();
  FeasibleRegion region;

  bool unbounded() const { return !margin.has_value(); }
};

inline MarginResult stabilityMargin(const CentroidalState& state, const ContactSet& contacts,
                                    double tolerance = kDefaultRegionTolerance, const RegionOptions& options = {}) {
  MarginResult result;
  result.icp = instantaneousCapturePoint(state, contacts);
  result.region = feasibleRegion(contacts, state, tolerance, options);
  if (result.region.kind != FeasibleRegion::Kind::Empty) result.margin = signedDistance(result.icp, result.region);
  return result;
}

// ─── Surrogate-training record ──────────────────────────────────────────────

inline constexpr int kStabilityFeatures = 47;

/// Column layout: vertical axis in base frame (3), v (3), omega (3), omega_dot (3), F_ext (3),
/// tau_ext (3), feet in base frame (4 x 3), contact flags (4), contact normals (4 x 3),
/// one reserved column held at zero.
inline const std::vector<std::string>& stabilityFeatureNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    const char* axes[] = {"x", "y", "z"};
    for (const char* block : {"up_base", "lin_vel", "ang_vel", "ang_acc", "ext_force", "ext_torque"})
      for (const char* a : axes) n.push_back(std::string(block) + "_" + a);
    for (const char* foot : {"lf", "rf", "lh", "rh"})
      for (const char* a : axes) n.push_back(std::string("foot_") + foot + "_" + a);
    for (const char* foot : {"lf", "rf", "lh", "rh"}) n.push_back(std::string("contact_") + foot);
    for (const char* foot : {"lf", "rf", "lh", "rh"})
      for (const char* a : axes) n.push_back(std::string("normal_") + foot + "_" + a);
    n.push_back("reserved");
    return n;
  }();
  return names;
}

struct StabilityRecord {
  std::array<double, kStabilityFeatures> features{};
  std::optional<double> margin;  // empty: unbounded (no feasible region)
};

inline StabilityRecord marginRecord(const CentroidalState& state, const ContactSet& contacts,
                                    const std::array<Vec3, 4>& feet_base,
                                    double tolerance = kDefaultRegionTolerance, const RegionOptions& options = {}) {
  const MarginResult m = stabilityMargin(state, contacts, tolerance, options);
  StabilityRecord rec;
  auto& f = rec.features;
  std::size_t k = 0;
  auto put = [&](const Vec3& v) {
    f[k++] = v.x();
    f[k++] = v.y();
    f[k++] = v.z();
  };
  put(state.base_orientation.conjugate() * Vec3::UnitZ());
  put(state.com_velocity);
  put(state.angular_velocity);
  put(state.angular_acceleration);
  put(state.external_force);
  put(state.external_torque);
  for (const auto& foot : feet_base) put(foot);
  for (std::size_t i = 0; i < 4; ++i) f[k++] = i < contacts.contacts.size() && contacts.contacts[i].active ? 1.0 : 0.0;
  for (std::size_t i = 0; i < 4; ++i) put(i < contacts.contacts.size() ? contacts.contacts[i].normal : Vec3::Zero());
  f[k++] = 0.0;
  rec.margin = m.margin;
  return rec;
}

/// Four-foot stance at (+-0.35, +-0.20) m about the base, ordered LF, RF, LH, RH.
inline std::array<Vec2, 4> nominalStanceOffsets() {
  return {Vec2(0.35, 0.20), Vec2(0.35, -0.20), Vec2(-0.35, 0.20), Vec2(-0.35, -0.20)};
}

inline ContactSet nominalStance(const Pose2& base = {}, double ground_z = 0.0, double mu = 0.6) {
  ContactSet set;
  for (const Vec2& off : nominalStanceOffsets()) {
    Contact c;
    c.position << base.toWorld(off), ground_z;
    c.friction_mu = mu;
    set.contacts.push_back(c);
  }
  return set;
}

}  // namespace quadloco
