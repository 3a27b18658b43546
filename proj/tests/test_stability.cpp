#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "quadloco/json_io.hpp"
#include "quadloco/stability.hpp"

using namespace quadloco;
using Kind = FeasibleRegion::Kind;

namespace {

ContactSet flatContacts(const std::vector<Vec3>& pts, double mu = 0.6) {
  ContactSet set;
  for (const auto& p : pts) {
    Contact c;
    c.position = p;
    c.friction_mu = mu;
    set.contacts.push_back(c);
  }
  return set;
}

std::vector<oracle::PointContact> toOracle(const ContactSet& set) {
  std::vector<oracle::PointContact> out;
  for (const auto& c : set.contacts) out.push_back({c.position, c.normal, c.friction_mu});
  return out;
}

ContactSet randomStance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.06, 0.06), height(0.0, 0.15);
  std::vector<Vec3> pts;
  for (const Vec2& off : nominalStanceOffsets()) pts.emplace_back(off.x() + jitter(rng), off.y() + jitter(rng), height(rng));
  std::uniform_int_distribution<int> drop(0, 4);
  const int skip = drop(rng);  // 4 keeps all feet
  if (skip < 4) pts.erase(pts.begin() + skip);
  return flatContacts(pts);
}

CentroidalState stateAt(double x, double y, double z) {
  CentroidalState s;
  s.com_position = Vec3(x, y, z);
  return s;
}

}  // namespace

TEST(CapturePoint, MatchesTheWorkedExample) {
  CentroidalState s = stateAt(0, 0, 0.5);
  s.com_velocity = Vec3(0.3, 0, 0);
  s.gravity = 9.81;
  const Vec2 icp = instantaneousCapturePoint(s, 0.5);
  EXPECT_NEAR(icp.x(), 0.3 * std::sqrt(0.5 / 9.81), 1e-15);
  EXPECT_NEAR(icp.x(), 0.0677, 5e-5);
  EXPECT_EQ(icp.y(), 0.0);
  EXPECT_THROW(instantaneousCapturePoint(s, 0.0), InvalidArgument);
}

TEST(FeasibleRegion, CoplanarSquareIsTheSupportPolygon) {
  const ContactSet sq = flatContacts({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const FeasibleRegion r = feasibleRegion(sq, stateAt(0.5, 0.5, 0.5));
  ASSERT_EQ(r.kind, Kind::Polygon);
  ASSERT_EQ(r.vertices.size(), 4u);
  EXPECT_NEAR(geometry::area(r.vertices), 1.0, 1e-9);
  EXPECT_LE(r.achieved_tolerance, kDefaultRegionTolerance);
  EXPECT_NEAR(signedDistance(Vec2(0.5, 0.5), r), 0.5, 1e-9);
  EXPECT_NEAR(signedDistance(Vec2(1.1, 0.5), r), -0.1, 1e-9);
}

TEST(StabilityMargin, SignConventionOnTheUnitSquare) {
  const ContactSet sq = flatContacts({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const MarginResult inside = stabilityMargin(stateAt(0.5, 0.5, 0.5), sq);
  ASSERT_TRUE(inside.margin);
  EXPECT_NEAR(*inside.margin, 0.5, 1e-9);
  CentroidalState moving = stateAt(0.5, 0.5, 0.5);
  // Put the capture point 0.1 m beyond the x = 1 edge.
  moving.com_velocity.x() = 0.6 / std::sqrt(0.5 / moving.gravity);
  const MarginResult outside = stabilityMargin(moving, sq);
  ASSERT_TRUE(outside.margin);
  EXPECT_NEAR(outside.icp.x(), 1.1, 1e-12);
  EXPECT_NEAR(*outside.margin, -0.1, 1e-9);
}

TEST(FeasibleRegion, AgreesWithStaticEquilibriumOracle) {
  std::mt19937_64 rng(11);
  const double tol = kDefaultRegionTolerance;
  for (int config = 0; config < 8; ++config) {
    const ContactSet set = randomStance(rng);
    const double com_z = 0.5;
    const FeasibleRegion r = feasibleRegion(set, stateAt(0, 0, com_z), tol);
    ASSERT_EQ(r.kind, Kind::Polygon);
    ASSERT_LE(r.achieved_tolerance, tol);
    for (double x = -0.5; x <= 0.5; x += 0.025)
      for (double y = -0.3; y <= 0.3; y += 0.025) {
        const bool truth = oracle::staticallyFeasible(toOracle(set), Vec3(x, y, com_z));
        const double inner_sd = geometry::signedDistanceConvex(Vec2(x, y), r.vertices);
        const double outer_sd = geometry::signedDistanceConvex(Vec2(x, y), r.outer_vertices);
        // Inner polygon is certified feasible; outside the outer polygon is certified infeasible.
        if (inner_sd > 1e-7) {
          EXPECT_TRUE(truth) << "config " << config << " at " << x << "," << y;
        }
        if (outer_sd < -1e-7) {
          EXPECT_FALSE(truth) << "config " << config << " at " << x << "," << y;
        }
        if (truth != (inner_sd >= 0.0)) {
          EXPECT_LE(std::abs(inner_sd), 1.5 * tol);
        }
      }
  }
}

TEST(FeasibleRegion, HighFrictionCoplanarRegionIsTheConvexHull) {
  std::mt19937_64 rng(12);
  for (int config = 0; config < 5; ++config) {
    ContactSet set = randomStance(rng);
    for (auto& c : set.contacts) {
      c.position.z() = 0.0;
      c.friction_mu = 10.0;
    }
    const FeasibleRegion r = feasibleRegion(set, stateAt(0, 0, 0.5), 0.002);
    std::vector<Vec2> xy;
    for (const auto& c : set.contacts) xy.push_back(c.position.head<2>());
    const auto hull = geometry::convexHull(xy);
    for (const Vec2& v : hull) EXPECT_GE(signedDistance(v, r), -0.01);
    for (const Vec2& v : r.vertices) EXPECT_GE(geometry::signedDistanceConvex(v, hull), -1e-9);
  }
}

TEST(FeasibleRegion, StaggeredContactsContainTheConvexHull) {
  // A CoM above any foot is held by a vertical force there, so the hull is always admissible;
  // with height differences friction lets the region reach beyond it.
  std::mt19937_64 rng(13);
  for (int config = 0; config < 5; ++config) {
    ContactSet set = randomStance(rng);
    for (auto& c : set.contacts) c.friction_mu = 10.0;
    const FeasibleRegion r = feasibleRegion(set, stateAt(0, 0, 0.5), 0.002);
    for (const auto& c : set.contacts) EXPECT_GE(signedDistance(c.position.head<2>(), r), -1e-7);
  }
}

TEST(FeasibleRegion, SingleContactIsAPoint) {
  const ContactSet one = flatContacts({{0.2, -0.1, 0.0}});
  const FeasibleRegion r = feasibleRegion(one, stateAt(0.2, -0.1, 0.5));
  ASSERT_EQ(r.kind, Kind::Point);
  EXPECT_NEAR((r.vertices[0] - Vec2(0.2, -0.1)).norm(), 0.0, 1e-9);
  const Vec2 q(0.5, 0.3);
  EXPECT_NEAR(signedDistance(q, r), -(q - Vec2(0.2, -0.1)).norm(), 1e-9);
}

TEST(FeasibleRegion, TwoContactsGiveTheSegment) {
  const ContactSet two = flatContacts({{0.35, 0.2, 0.0}, {-0.35, -0.2, 0.0}});
  const FeasibleRegion r = feasibleRegion(two, stateAt(0, 0, 0.5));
  ASSERT_EQ(r.kind, Kind::Segment);
  const Vec2 a(0.35, 0.2), b(-0.35, -0.2);
  const bool forward = (r.vertices[0] - b).norm() < 1e-9;
  EXPECT_NEAR((r.vertices[forward ? 0 : 1] - b).norm(), 0.0, 1e-9);
  EXPECT_NEAR((r.vertices[forward ? 1 : 0] - a).norm(), 0.0, 1e-9);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Vec2 p(d(rng), d(rng));
    ASSERT_NEAR(signedDistance(p, r), -oracle::segmentDistance(p, a, b), 1e-9);
  }
}

TEST(FeasibleRegion, TinyForceCapsGiveEmpty) {
  ContactSet set = nominalStance();
  const CentroidalState s;
  for (auto& c : set.contacts) c.f_max = s.mass * s.gravity / 4.0 * (1.0 - 1e-3);
  EXPECT_EQ(feasibleRegion(set, s).kind, Kind::Empty);
  const MarginResult m = stabilityMargin(s, set);
  EXPECT_TRUE(m.unbounded());
  for (auto& c : set.contacts) c.f_max = s.mass * s.gravity / 4.0 * (1.0 + 1e-3);
  EXPECT_NE(feasibleRegion(set, s).kind, Kind::Empty);
}

TEST(FeasibleRegion, ForceCapsShrinkTheRegion) {
  ContactSet set = nominalStance();
  const CentroidalState s;
  const double free_area = geometry::area(feasibleRegion(set, s).vertices);
  for (auto& c : set.contacts) c.f_max = 0.4 * s.mass * s.gravity;
  const FeasibleRegion capped = feasibleRegion(set, s);
  ASSERT_EQ(capped.kind, Kind::Polygon);
  EXPECT_LT(geometry::area(capped.vertices), free_area - 0.01);
}

TEST(FeasibleRegion, TranslationAndYawEquivariance) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-0.6, 0.6);
  for (int config = 0; config < 5; ++config) {
    const ContactSet set = randomStance(rng);
    const FeasibleRegion r = feasibleRegion(set, stateAt(0, 0, 0.5), 0.005);
    const double yaw = d(rng) * 3.0;
    const Vec2 shift(d(rng), d(rng));
    const Eigen::Rotation2Dd rot(yaw);
    ContactSet moved = set;
    for (auto& c : moved.contacts) c.position.head<2>() = rot * c.position.head<2>() + shift;
    const FeasibleRegion m = feasibleRegion(moved, stateAt(shift.x(), shift.y(), 0.5), 0.005);
    for (int k = 0; k < 50; ++k) {
      const Vec2 p(d(rng), d(rng));
      ASSERT_NEAR(signedDistance(p, r), signedDistance(rot * p + shift, m), 0.0105);
    }
  }
}

TEST(FeasibleRegion, FinerToleranceKeepsTheCoarseInnerPolygon) {
  std::mt19937_64 rng(31);
  const ContactSet set = randomStance(rng);
  const FeasibleRegion coarse = feasibleRegion(set, stateAt(0, 0, 0.5), 0.02);
  const FeasibleRegion fine = feasibleRegion(set, stateAt(0, 0, 0.5), 0.001);
  EXPECT_LE(fine.achieved_tolerance, 0.001);
  for (const Vec2& v : coarse.vertices) EXPECT_GE(signedDistance(v, fine), -0.001 - 1e-9);
  EXPECT_GE(geometry::area(fine.vertices), geometry::area(coarse.vertices) - 1e-9);
}

TEST(FeasibleRegion, RejectsInvalidInputs) {
  ContactSet set = nominalStance();
  EXPECT_THROW(feasibleRegion(set, CentroidalState{}, 0.0), InvalidArgument);
  ContactSet none = set;
  for (auto& c : none.contacts) c.active = false;
  EXPECT_THROW(feasibleRegion(none, CentroidalState{}), InvalidArgument);
  ContactSet bad = set;
  bad.contacts[0].normal = Vec3(0, 0, 2);
  EXPECT_THROW(feasibleRegion(bad, CentroidalState{}), InvalidArgument);
  CentroidalState massless;
  massless.mass = 0.0;
  EXPECT_THROW(feasibleRegion(set, massless), InvalidArgument);
}

TEST(MarginRecord, HasFortySevenColumnsAndFlags) {
  const ContactSet set = nominalStance();
  std::array<Vec3, 4> feet;
  for (int i = 0; i < 4; ++i) feet[i] << nominalStanceOffsets()[i], -0.5;
  const StabilityRecord rec = marginRecord(CentroidalState{}, set, feet);
  ASSERT_EQ(stabilityFeatureNames().size(), 47u);
  EXPECT_EQ(rec.features.size(), 47u);
  EXPECT_EQ(rec.features[2], 1.0);  // vertical axis in base frame
  for (int i = 0; i < 4; ++i) EXPECT_EQ(rec.features[30 + i], 1.0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(rec.features[34 + 3 * i + 2], 1.0);
  EXPECT_EQ(rec.features[46], 0.0);
  ASSERT_TRUE(rec.margin);
  EXPECT_NEAR(*rec.margin, 0.20, 1e-9);
}

TEST(MarginJson, RoundTripsStateAndContacts) {
  CentroidalState s = stateAt(0.1, -0.2, 0.45);
  s.com_velocity = Vec3(0.3, 0.1, 0.0);
  s.external_force = Vec3(5, 0, 0);
  ContactSet set = nominalStance();
  set.contacts[1].active = false;
  set.contacts[2].f_max = 150.0;
  const CentroidalState s2 = json::stateFromJson(json::toJson(s));
  const ContactSet set2 = json::contactSetFromJson(json::toJson(set));
  EXPECT_EQ(s2.com_position, s.com_position);
  EXPECT_EQ(s2.com_velocity, s.com_velocity);
  EXPECT_EQ(s2.external_force, s.external_force);
  ASSERT_EQ(set2.contacts.size(), 4u);
  EXPECT_FALSE(set2.contacts[1].active);
  EXPECT_EQ(set2.contacts[2].f_max, 150.0);
  EXPECT_TRUE(std::isinf(set2.contacts[0].f_max));
  const MarginResult a = stabilityMargin(s, set), b = stabilityMargin(s2, set2);
  EXPECT_EQ(a.margin, b.margin);
}
