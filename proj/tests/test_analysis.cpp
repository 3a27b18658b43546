#include <gtest/gtest.h>

#include <random>

#include "quadloco/analysis.hpp"

using namespace quadloco;

namespace {

std::vector<TrialRecord> randomTrials(std::size_t n, std::uint64_t seed, double p_success) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> fx(0.0, 200.0), fy(1.0, 4.0), u(0.0, 1.0);
  std::vector<TrialRecord> out(n);
  for (auto& t : out) t = {fx(rng), fy(rng), u(rng) < p_success, ""};
  return out;
}

}  // namespace

TEST(Kde, AllSuccessAndAllFailure) {
  const GridAxis gx{0, 200, 21}, gy{1, 4, 7};
  for (bool outcome : {true, false}) {
    auto trials = randomTrials(60, 1, 0.5);
    for (auto& t : trials) t.success = outcome;
    const SuccessGrid g = kdeSuccessGrid(trials, gx, gy);
    for (const auto& v : g.values) {
      ASSERT_TRUE(v);
      EXPECT_EQ(*v, outcome ? 1.0 : 0.0);
    }
  }
}

TEST(Kde, CoLocatedHalfAndHalf) {
  std::vector<TrialRecord> trials{{1.0, 2.0, true, ""}, {1.0, 2.0, false, ""}, {1.0, 2.0, true, ""},
                                  {1.0, 2.0, false, ""}};
  const SuccessGrid g = kdeSuccessGrid(trials, {1.0, 1.0, 1}, {2.0, 2.0, 1}, 0.3, 0.3);
  EXPECT_EQ(*g.at(0, 0), 0.5);
}

TEST(Kde, MatchesTheWeightedRatioOracle) {
  const auto trials = randomTrials(40, 2, 0.6);
  const SuccessGrid g = kdeSuccessGrid(trials, {0, 200, 5}, {1, 4, 4}, 30.0, 0.7);
  for (std::size_t iy = 0; iy < 4; ++iy)
    for (std::size_t ix = 0; ix < 5; ++ix) {
      long double num = 0, den = 0;
      for (const auto& t : trials) {
        const long double w = std::exp(-0.5L * std::pow((g.xs[ix] - t.x) / 30.0, 2) -
                                        0.5L * std::pow((g.ys[iy] - t.y) / 0.7, 2));
        den += w;
        num += t.success ? w : 0;
      }
      EXPECT_NEAR(*g.at(ix, iy), static_cast<double>(num / den), 1e-12);
    }
}

TEST(Kde, DuplicationAndAxisSwapInvariance) {
  auto trials = randomTrials(30, 3, 0.4);
  const GridAxis gx{0, 200, 6}, gy{1, 4, 5};
  const SuccessGrid a = kdeSuccessGrid(trials, gx, gy, 25.0, 0.5);
  auto doubled = trials;
  doubled.insert(doubled.end(), trials.begin(), trials.end());
  const SuccessGrid b = kdeSuccessGrid(doubled, gx, gy, 25.0, 0.5);
  auto swapped = trials;
  for (auto& t : swapped) std::swap(t.x, t.y);
  const SuccessGrid c = kdeSuccessGrid(swapped, gy, gx, 0.5, 25.0);
  for (std::size_t iy = 0; iy < 5; ++iy)
    for (std::size_t ix = 0; ix < 6; ++ix) {
      EXPECT_NEAR(*a.at(ix, iy), *b.at(ix, iy), 1e-12);
      EXPECT_NEAR(*a.at(ix, iy), *c.at(iy, ix), 1e-12);
    }
}

TEST(Kde, NarrowBandwidthRecoversClusterMeansAndFlagsGaps) {
  std::vector<TrialRecord> trials;
  for (int i = 0; i < 4; ++i) trials.push_back({0.0, 0.0, i < 3, ""});
  for (int i = 0; i < 5; ++i) trials.push_back({10.0, 10.0, i < 1, ""});
  const SuccessGrid g = kdeSuccessGrid(trials, {0, 10, 3}, {0, 10, 3}, 0.5, 0.5);
  EXPECT_NEAR(*g.at(0, 0), 0.75, 1e-12);
  EXPECT_NEAR(*g.at(2, 2), 0.2, 1e-12);
  EXPECT_FALSE(g.at(1, 1).has_value());
  const std::string csv = successGridCsv(g);
  EXPECT_EQ(csv.rfind("x,y,success_rate\n", 0), 0u);
  EXPECT_NE(csv.find("5,5,nodata"), std::string::npos);
  const auto pgm = successGridPgm(g);
  EXPECT_EQ(pgm.size(), std::string("P5\n3 3\n255\n").size() + 9);
}

TEST(Kde, SilvermanAndErrors) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const double sigma = std::sqrt(2.5);
  EXPECT_NEAR(silvermanBandwidth(v), sigma * std::pow(4.0 / (4.0 * 5.0), 1.0 / 6.0), 1e-15);
  EXPECT_THROW(kdeSuccessGrid({{0, 0, true, ""}}, {}, {}), InvalidArgument);
  EXPECT_THROW(kdeSuccessGrid(randomTrials(5, 1, 0.5), {}, {}, 0.0, 1.0), InvalidArgument);
  std::vector<TrialRecord> same(3, TrialRecord{1.0, 1.0, true, ""});
  EXPECT_THROW(kdeSuccessGrid(same, {}, {}), InvalidArgument);
}
