#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace quadloco {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kStandardGravity = 9.81;
inline constexpr double kPi = 3.14159265358979323846;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or parameter-range violation.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Query outside the metric extent of a grid.
class OutOfExtent : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside the LP solver (distinct from infeasibility).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// File or stream could not be read or written, or had the wrong format.
class IoError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

/// Planar pose: position plus heading.
struct Pose2 {
  Vec2 position = Vec2::Zero();
  double yaw = 0.0;

  Vec2 toWorld(const Vec2& local) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return position + Vec2(c * local.x() - s * local.y(), s * local.x() + c * local.y());
  }
  Vec2 toLocal(const Vec2& world) const {
    const double c = std::cos(yaw), s = std::sin(yaw);
    const Vec2 d = world - position;
    return Vec2(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
  }
};

inline Vec2 rotate(const Vec2& v, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return Vec2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}

}  // namespace quadloco
