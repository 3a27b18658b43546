#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "quadloco/heightfield.hpp"
#include "quadloco/png_io.hpp"
#include "quadloco/terrain_json.hpp"

using namespace quadloco;

namespace {

std::uint16_t code(double metres) { return static_cast<std::uint16_t>(std::lround(metres * 65535.0 / 2.0)); }

Heightfield randomGrid(int rows, int cols, std::uint64_t seed) {
  Heightfield hf(rows, cols);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(0, 65535);
  for (auto& c : hf.cells) c = static_cast<std::uint16_t>(d(rng));
  return hf;
}

}  // namespace

TEST(Encoding, FullScaleCodeIsTwoMetres) {
  Heightfield hf(1, 1);
  EXPECT_EQ(hf.metres(65535), 2.0);
  EXPECT_EQ(hf.metres(0), 0.0);
  EXPECT_EQ(hf.encode(2.0), 65535);
  EXPECT_EQ(hf.encode(5.0), 65535);
  EXPECT_EQ(hf.encode(-0.3), 0);
}

TEST(Encoding, EveryCodeSurvivesMetresAndBack) {
  Heightfield hf(1, 1);
  for (int c = 0; c <= 65535; ++c) ASSERT_EQ(hf.encode(hf.metres(static_cast<std::uint16_t>(c))), c);
}

TEST(Png, RandomGridRoundTripsBitExactly) {
  const Heightfield hf = randomGrid(37, 53, 42);
  const Heightfield back = decodePng(encodePng(hf), {}, 37, 53);
  EXPECT_EQ(back.cells, hf.cells);
}

TEST(Png, AllZeroWorldGridDecodesToZeros) {
  Heightfield hf;
  hf.cells.assign(static_cast<std::size_t>(hf.rows) * hf.cols, 0);
  const Heightfield back = decodePng(encodePng(hf));
  EXPECT_EQ(back.rows, 1001);
  EXPECT_EQ(back.cols, 1001);
  for (auto c : back.cells) ASSERT_EQ(c, 0);
}

TEST(Png, RejectsDimensionMismatchAndGarbage) {
  const auto bytes = encodePng(randomGrid(4, 5, 1));
  EXPECT_THROW(decodePng(bytes, {}, 5, 5), IoError);
  EXPECT_THROW(decodePng(std::vector<std::uint8_t>{1, 2, 3}), IoError);
  auto truncated = bytes;
  truncated.resize(truncated.size() / 2);
  EXPECT_THROW(decodePng(truncated), IoError);
}

TEST(Png, SidecarCarriesGeometry) {
  Heightfield hf(3, 4, 0.05, 1.5, Vec2(-1.0, 2.0));
  const PngGeometry g = geometryFromSidecar(sidecarJson(hf));
  EXPECT_EQ(g.resolution, 0.05);
  EXPECT_EQ(g.z_scale, 1.5);
  EXPECT_EQ(g.origin, Vec2(-1.0, 2.0));
  EXPECT_THROW(geometryFromSidecar(nlohmann::json{{"resolution", 0.02}}), IoError);
}

TEST(HeightAt, CellCentresAndMidpoints) {
  Heightfield hf(3, 3, 0.02, 2.0, Vec2(0, 0));
  hf.at(1, 1) = code(0.1);
  EXPECT_DOUBLE_EQ(heightAt(hf, 0.02, 0.02), hf.metres(code(0.1)));
  EXPECT_DOUBLE_EQ(heightAt(hf, 0.0, 0.0), 0.0);
  EXPECT_NEAR(heightAt(hf, 0.03, 0.02), 0.5 * hf.metres(code(0.1)), 1e-15);
  EXPECT_THROW(heightAt(hf, 0.05, 0.0), OutOfExtent);
  EXPECT_THROW(heightAt(hf, -0.01, 0.0), OutOfExtent);
}

TEST(HeightAt, ContinuousAcrossCellBoundaries) {
  const Heightfield hf = randomGrid(10, 10, 3);
  double max_grad = 0.0;
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c + 1 < 10; ++c)
      max_grad = std::max(max_grad, std::abs(hf.heightAtCell(r, c + 1) - hf.heightAtCell(r, c)) / hf.resolution);
  const double eps = 1e-7;
  for (int c = 1; c < 9; ++c) {
    const double x = c * hf.resolution;
    EXPECT_LE(std::abs(heightAt(hf, x + eps, 0.05) - heightAt(hf, x - eps, 0.05)), 2 * eps * max_grad * 2 + 1e-12);
  }
}

TEST(MaxHeightOnSegment, MatchesDenseSampling) {
  Heightfield hf(50, 50, 0.02, 2.0, Vec2(0, 0));
  for (int r = 0; r < 50; ++r)
    for (int c = 25; c < 50; ++c) hf.at(r, c) = code(0.1);
  const Vec2 a(0.1, 0.3), b(0.8, 0.4);
  double dense = 0.0;
  for (int i = 0; i <= 2000; ++i) dense = std::max(dense, heightAt(hf, a + (b - a) * (i / 2000.0)));
  EXPECT_DOUBLE_EQ(maxHeightOnSegment(hf, a, b), dense);
  EXPECT_DOUBLE_EQ(maxHeightOnSegment(hf, a, b), hf.metres(code(0.1)));
  EXPECT_DOUBLE_EQ(maxHeightOnSegment(hf, a, a), heightAt(hf, a));
  EXPECT_THROW(maxHeightOnSegment(hf, a, Vec2(2.0, 0.0)), OutOfExtent);
}

TEST(GenerateTerrain, StairsRiseByEqualSteps) {
  TerrainObjectSpec spec{Stairs{4, 0.4, 0.3}, Vec2(0, 0), 0.0, 2.0, 1.0};
  const Heightfield hf = generateTerrain({spec}, 1);
  // Along the object centre line, cells at local u = -1 + k * 0.3 + 0.1 lie on step k + 1.
  int previous = 0;
  for (int k = 0; k < 4; ++k) {
    const double x = -1.0 + k * 0.3 + 0.1;
    const int col = static_cast<int>(std::lround((x - hf.origin.x()) / hf.resolution));
    const int row = static_cast<int>(std::lround((0.0 - hf.origin.y()) / hf.resolution));
    const int c = hf.at(row, col);
    EXPECT_EQ(c, code((k + 1) * 0.1));
    if (k > 0) {
      EXPECT_GE(c - previous, 3276);
      EXPECT_LE(c - previous, 3277);
    }
    previous = c;
  }
}

TEST(GenerateTerrain, BricksUseThreeLevelsClampedAtZero) {
  TerrainObjectSpec spec{Bricks{0.10, 0.05}, Vec2(1, -1), 0.4, 2.0, 2.0};
  const Heightfield hf = generateTerrain({spec}, 7);
  std::set<int> values(hf.cells.begin(), hf.cells.end());
  for (int v : values) EXPECT_TRUE(v == 0 || v == 1638) << v;
  EXPECT_EQ(values.count(1638), 1u);
}

TEST(GenerateTerrain, DeterministicAndLastWriterWins) {
  TerrainObjectSpec low{Planks{0.25, 0.1, 0.05}, Vec2(0, 0), 0.0, 2.0, 2.0};
  TerrainObjectSpec high{Stairs{3, 0.9, 0.2}, Vec2(0.5, 0), 0.0, 1.0, 1.0};
  const Heightfield a = generateTerrain({low, high}, 11);
  EXPECT_EQ(a, generateTerrain({low, high}, 11));
  const int row = static_cast<int>(std::lround((0.0 - a.origin.y()) / a.resolution));
  const int col = static_cast<int>(std::lround((0.95 - a.origin.x()) / a.resolution));
  EXPECT_EQ(a.at(row, col), code(0.9));
  const Heightfield b = generateTerrain({high, low}, 11);
  EXPECT_EQ(b.at(row, col), code(0.1));
}

TEST(GenerateTerrain, RejectsBadSpecs) {
  EXPECT_THROW(generateTerrain({}, 1), InvalidArgument);
  TerrainObjectSpec s{Stairs{}, Vec2(0, 0), 0.0, 2.0, 2.0};
  EXPECT_THROW(generateTerrain(std::vector<TerrainObjectSpec>(6, s), 1), InvalidArgument);
  TerrainObjectSpec outside{Stairs{}, Vec2(9.5, 0), 0.0, 2.0, 2.0};
  EXPECT_THROW(generateTerrain({outside}, 1), InvalidArgument);
  TerrainObjectSpec steps{Stairs{9, 0.3, 0.3}, Vec2(0, 0), 0.0, 2.0, 2.0};
  EXPECT_THROW(generateTerrain({steps}, 1), InvalidArgument);
  TerrainObjectSpec wave{Wave{-0.1, 1.0}, Vec2(0, 0), 0.0, 2.0, 2.0};
  EXPECT_THROW(generateTerrain({wave}, 1), InvalidArgument);
}

TEST(GenerateTerrain, UnstructuredSpansItsAmplitude) {
  TerrainObjectSpec spec{Unstructured{0.025, 3.0}, Vec2(0, 0), 0.0, 2.0, 2.0};
  const Heightfield hf = generateTerrain({spec}, 5);
  const auto [lo, hi] = std::minmax_element(hf.cells.begin(), hf.cells.end());
  EXPECT_EQ(*lo, 0);
  EXPECT_EQ(*hi, code(0.025));
}

TEST(EvalTerrain, WavePeakIsTheAmplitude) {
  const Heightfield hf = composeEvalTerrain(Wave{0.1, kPi}, 3.0, 2);
  EXPECT_EQ(hf.rows, 251);
  EXPECT_EQ(hf.cols, 251);
  const int peak = *std::max_element(hf.cells.begin(), hf.cells.end());
  EXPECT_TRUE(peak == 3276 || peak == 3277) << peak;
}

TEST(EvalTerrain, StairsGiveThreeIncreasingPlateaus) {
  const Heightfield hf = composeEvalTerrain(Stairs{3, 0.25, 0.3}, 2.0, 5);
  const int row = 125;
  std::vector<int> plateaus;
  for (int c = 0; c < hf.cols; ++c) {
    const int v = hf.at(row, c);
    if (v != 0 && (plateaus.empty() || plateaus.back() != v)) plateaus.push_back(v);
  }
  ASSERT_EQ(plateaus.size(), 3u);
  EXPECT_LT(plateaus[0], plateaus[1]);
  EXPECT_LT(plateaus[1], plateaus[2]);
}

TEST(EvalTerrain, BricksLeaveAFlatBorder) {
  const Heightfield hf = composeEvalTerrain(Bricks{0.1, 0.02}, 3.6, 9);
  const int ring = static_cast<int>(std::floor(0.7 / hf.resolution));
  for (int r = 0; r < hf.rows; ++r)
    for (int c = 0; c < hf.cols; ++c)
      if (r < ring || c < ring || r >= hf.rows - ring || c >= hf.cols - ring) ASSERT_EQ(hf.at(r, c), 0);
  EXPECT_THROW(composeEvalTerrain(Bricks{}, 3.7, 1), InvalidArgument);
  EXPECT_THROW(composeEvalTerrain(Bricks{}, 1.9, 1), InvalidArgument);
}

TEST(EvalTerrain, SampledStairsFollowTheSweep) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto [shape, length] = sampleEvalObject(TerrainKind::Stairs, seed);
    const auto& s = std::get<Stairs>(shape);
    ASSERT_GE(s.n_steps, 3);
    ASSERT_LE(s.n_steps, 8);
    ASSERT_GE(s.total_height, 0.25);
    ASSERT_LE(s.total_height, 0.8);
    ASSERT_GE(length, 2.0);
    ASSERT_LE(length, 3.6);
  }
}

TEST(TerrainJson, SpecsRoundTrip) {
  std::vector<TerrainObjectSpec> specs{{Stairs{5, 0.5, 0.25}, Vec2(1, 2), 0.3, 2.5, 1.5},
                                       {Wave{0.08, 2.0}, Vec2(-3, 0), 0.0, 2.0, 2.0},
                                       {Bricks{0.1, 0.03}, Vec2(0, 0), 1.0, 3.0, 3.0},
                                       {Unstructured{0.02, 2.0}, Vec2(4, 4), 0.0, 2.0, 2.0},
                                       {Planks{0.25, 0.1, 0.05}, Vec2(-4, -4), 0.0, 2.0, 2.0}};
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : specs) j.push_back(toJson(s));
  const auto back = specsFromJson(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.size(), specs.size());
  EXPECT_EQ(generateTerrain(back, 3), generateTerrain(specs, 3));
  EXPECT_THROW(specsFromJson(nlohmann::json::parse(R"([{"kind":"volcano"}])")), InvalidArgument);
}
