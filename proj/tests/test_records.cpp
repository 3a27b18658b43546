#include <gtest/gtest.h>

#include <random>

#include "quadloco/records.hpp"

using namespace quadloco;

namespace {

std::vector<ActuatorSample> randomStream(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0), gain(1.0, 80.0);
  std::vector<ActuatorSample> s(n);
  for (auto& x : s) x = {u(rng), u(rng), u(rng), u(rng), u(rng), gain(rng), gain(rng), u(rng)};
  return s;
}

}  // namespace

TEST(ActuatorRecord, LagsFollowTheDocumentedOffsets) {
  std::vector<ActuatorSample> s(20);
  for (std::size_t t = 0; t < s.size(); ++t) {
    const double v = static_cast<double>(t);
    s[t] = {v, 100 + v, 200 + v, 300 + v, 400 + v, 500 + v, 600 + v, 700 + v};
  }
  const auto row = actuatorRecord(s, 12);
  ASSERT_EQ(row.size(), 22u);
  ASSERT_EQ(actuatorColumns().size(), 22u);
  const std::vector<double> expected{12,  8,   4,   111, 107, 103, 211, 207, 203, 312, 308,
                                     304, 412, 408, 404, 512, 508, 504, 612, 608, 604, 712};
  EXPECT_EQ(row, expected);
  EXPECT_EQ(actuatorColumns()[3], "vel_err_t-1");
  EXPECT_EQ(actuatorColumns()[0], "pos_err_t");
  EXPECT_THROW(actuatorRecord(s, 8), InvalidArgument);
  s[4].kp = 0.0;
  EXPECT_THROW(actuatorRecord(s, 12), InvalidArgument);
  EXPECT_EQ(actuatorRecords(randomStream(30, 1)).size(), 21u);
}

TEST(RecordCsv, ActuatorRoundTripIsExact) {
  const RecordSet set = actuatorRecords(randomStream(1009, 2));
  ASSERT_EQ(set.size(), 1000u);
  const RecordSet back = readCsv(writeCsv(set), actuatorColumns());
  EXPECT_EQ(back, set);
}

TEST(RecordCsv, EmptySetIsHeaderOnly) {
  const RecordSet empty{{"a", "b"}, {}};
  EXPECT_EQ(writeCsv(empty), "a,b\n");
  EXPECT_EQ(readCsv("a,b\n"), empty);
}

TEST(RecordCsv, UnboundedMarginUsesTheToken) {
  RecordSet set{stabilityColumns(), {}};
  StabilityRecord rec;
  rec.features[3] = 0.25;
  set.rows.push_back(toRow(rec));
  rec.margin = -0.125;
  set.rows.push_back(toRow(rec));
  const std::string text = writeCsv(set);
  EXPECT_NE(text.find(",unbounded\n"), std::string::npos);
  const RecordSet back = readCsv(text, stabilityColumns());
  EXPECT_EQ(back.width(), 48u);
  EXPECT_TRUE(std::isinf(back.rows[0].back()) && back.rows[0].back() < 0);
  EXPECT_EQ(back.rows[1].back(), -0.125);
}

TEST(RecordCsv, MalformedInputsAreRejected) {
  EXPECT_THROW(readCsv("a,b\n1\n"), IoError);
  EXPECT_THROW(readCsv("a,b\n1,x\n"), IoError);
  EXPECT_THROW(readCsv("a,b\n1,nan\n"), IoError);
  EXPECT_THROW(readCsv(""), IoError);
  EXPECT_THROW(readCsv("a,c\n1,2\n", {"a", "b"}), IoError);
  EXPECT_THROW(writeCsv(RecordSet{{"a", "b"}, {{1.0}}}), InvalidArgument);
  EXPECT_THROW(writeCsv(RecordSet{{"a"}, {{std::nan("")}}}), InvalidArgument);
  EXPECT_EQ(readCsv("a,b\r\n1,2\r\n").rows[0], (std::vector<double>{1, 2}));
}

TEST(GridCsv, RoundTripAndErrors) {
  Grid2 g(3, 4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double& v : g.data) v = u(rng);
  const Grid2 back = parseGridCsv(gridCsv(g));
  EXPECT_EQ(back.rows, 3);
  EXPECT_EQ(back.cols, 4);
  EXPECT_EQ(back.data, g.data);
  EXPECT_THROW(parseGridCsv("1,2\n3\n"), IoError);
  EXPECT_THROW(parseGridCsv(""), IoError);
  EXPECT_THROW(parseGridCsv("1,unbounded\n"), IoError);
}
