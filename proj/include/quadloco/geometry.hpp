#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "quadloco/common.hpp"

namespace quadloco::geometry {

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Andrew's monotone chain; returns the hull counter-clockwise without repeated points.
/// Collinear boundary points are dropped.
inline std::vector<Vec2> convexHull(std::vector<Vec2> pts, double eps = 1e-12) {
  // Snapping to the tolerance grid keeps near-vertical runs in a consistent order.
  if (eps > 0.0)
    for (auto& p : pts) p = Vec2(std::round(p.x() / eps) * eps, std::round(p.y() / eps) * eps);
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [&](const Vec2& a, const Vec2& b) { return (a - b).norm() <= eps; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i - 1] - hull[k - 2]) <= eps) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

inline double area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

inline double distanceToSegment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// Inside test for a counter-clockwise convex polygon (boundary counts as inside).
inline bool insideConvex(const Vec2& p, const std::vector<Vec2>& ccw, double eps = 0.0) {
  if (ccw.size() < 3) return false;
  for (std::size_t i = 0; i < ccw.size(); ++i) {
    const Vec2& a = ccw[i];
    const Vec2& b = ccw[(i + 1) % ccw.size()];
    const double len = (b - a).norm();
    if (len == 0.0) continue;
    if (cross(b - a, p - a) / len < -eps) return false;
  }
  return true;
}

/// Positive inside, negative outside, zero on the boundary of a CCW convex polygon.
inline double signedDistanceConvex(const Vec2& p, const std::vector<Vec2>& ccw) {
  double boundary = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ccw.size(); ++i)
    boundary = std::min(boundary, distanceToSegment(p, ccw[i], ccw[(i + 1) % ccw.size()]));
  return insideConvex(p, ccw) ? boundary : -boundary;
}

/// Intersection of the lines n1.x = s1 and n2.x = s2; false when (nearly) parallel.
inline bool intersectLines(const Vec2& n1, double s1, const Vec2& n2, double s2, Vec2& out) {
  const double det = cross(n1, n2);
  if (std::abs(det) < 1e-12) return false;
  out = Vec2((s1 * n2.y() - s2 * n1.y()) / det, (n1.x() * s2 - n2.x() * s1) / det);
  return true;
}

}  // namespace quadloco::geometry
