#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "quadloco/json_io.hpp"
#include "quadloco/png_io.hpp"

using namespace quadloco;
namespace fs = std::filesystem;
using Json = nlohmann::json;
namespace qj = quadloco::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result runCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("quadloco_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

Json errorOf(const Result& r) { return Json::parse(r.err).at("error"); }

}  // namespace

TEST_F(CliTest, UnknownAndMissingSubcommandsExitTwo) {
  Result r = runCli({"teleport"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(errorOf(r)["exit_code"], 2);
  EXPECT_EQ(runCli({}).code, 2);
}

TEST_F(CliTest, ValidationErrorsExitThree) {
  Result r = runCli({"terrain-eval", "--kind", "stairs", "--out", path("a.png")});  // no seed
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(errorOf(r)["kind"], "validation");
  EXPECT_EQ(runCli({"terrain-eval", "--kind", "volcano", "--seed", "1", "--out", path("a.png")}).code, 3);
  EXPECT_EQ(runCli({"margin", "--state"}).code, 3);
  EXPECT_EQ(runCli({"kde", "--trials", path("t.csv"), "--bogus", "1"}).code, 3);
  EXPECT_FALSE(fs::exists(path("a.png")));
}

TEST_F(CliTest, IoErrorsExitFour) {
  Result r = runCli({"margin", "--state", path("missing.json"), "--contacts", path("missing.json")});
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(errorOf(r)["kind"], "io");
  spit(path("broken.json"), "{not json");
  EXPECT_EQ(runCli({"margin", "--state", path("broken.json"), "--contacts", path("broken.json")}).code, 4);
}

TEST_F(CliTest, OutputsAreNeverOverwrittenWithoutForce) {
  const std::vector<std::string> args{"terrain-eval", "--kind", "wave", "--seed", "7", "--out", path("w.png")};
  ASSERT_EQ(runCli(args).code, 0) << runCli(args).err;
  const std::string first = slurp(path("w.png"));
  spit(path("w.png"), "sentinel");
  EXPECT_EQ(runCli(args).code, 4);
  EXPECT_EQ(slurp(path("w.png")), "sentinel");
  auto forced = args;
  forced.push_back("--force");
  EXPECT_EQ(runCli(forced).code, 0);
  EXPECT_EQ(slurp(path("w.png")), first);
  EXPECT_EQ(loadHeightfield(path("w.png")).rows, 251);
}

TEST_F(CliTest, MarginMatchesTheLibraryExactly) {
  CentroidalState s;
  s.com_position = Vec3(0.05, -0.02, 0.48);
  s.com_velocity = Vec3(0.3, 0.1, 0.0);
  const ContactSet c = nominalStance();
  spit(path("state.json"), qj::toJson(s).dump());
  spit(path("contacts.json"), qj::toJson(c).dump());
  const Result r = runCli({"margin", "--state", path("state.json"), "--contacts", path("contacts.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto parsed = nlohmann::json::parse(r.out);
  const MarginResult lib = stabilityMargin(qj::stateFromJson(qj::toJson(s)), qj::contactSetFromJson(qj::toJson(c)));
  EXPECT_EQ(parsed, qj::toJson(lib));
  EXPECT_EQ(parsed["margin"].get<double>(), *lib.margin);
}

TEST_F(CliTest, RandomizeIsSeeded) {
  const auto a = runCli({"randomize", "--policy", "tracking", "--count", "5", "--seed", "3", "--out", path("a.csv")});
  const auto b = runCli({"randomize", "--policy", "tracking", "--count", "5", "--seed", "3", "--out", path("b.csv")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(runCli({"randomize", "--policy", "tracking", "--count", "5", "--out", path("c.csv")}).code, 3);
}

TEST_F(CliTest, EmptyBatchWritesAHeaderOnlySummary) {
  spit(path("m.json"), R"({"entries": []})");
  const Result r = runCli({"batch", "--manifest", path("m.json"), "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("out/summary.csv")), "id,command,seed,status,exit_code,output,fnv1a64\n");
  EXPECT_EQ(Json::parse(r.out)["entries"], 0);
}

TEST_F(CliTest, BatchCountsResumesAndIsDeterministic) {
  Json entries = Json::array();
  const char* kinds[] = {"stairs", "wave", "bricks", "unstructured", "planks"};
  for (int i = 0; i < 6; ++i)
    entries.push_back({{"id", "t" + std::to_string(i)}, {"command", "terrain-eval"}, {"args", {{"kind", kinds[i % 5]}}},
                       {"seed", 100 + i}});
  entries.push_back({{"id", "bad"}, {"command", "terrain-eval"}, {"args", {{"kind", "volcano"}}}, {"seed", 1}});
  spit(path("m.json"), Json{{"entries", entries}}.dump());

  Result r = runCli({"batch", "--manifest", path("m.json"), "--out", path("a"), "--workers", "3"});
  EXPECT_EQ(r.code, 1);
  Json stats = Json::parse(r.out);
  EXPECT_EQ(stats["executed"], 6);
  EXPECT_EQ(stats["failed"], 1);
  EXPECT_TRUE(fs::exists(path("a/bad.error.json")));
  for (int i = 0; i < 6; ++i) EXPECT_TRUE(fs::exists(path("a/t" + std::to_string(i) + ".png")));

  // Resume: drop one output and the failing entry; only that one entry runs again.
  entries.erase(entries.end() - 1);
  spit(path("m.json"), Json{{"entries", entries}}.dump());
  const std::string summary_before = slurp(path("a/summary.csv"));
  fs::remove(path("a/t3.png"));
  r = runCli({"batch", "--manifest", path("m.json"), "--out", path("a")});
  EXPECT_EQ(r.code, 0) << r.err;
  stats = Json::parse(r.out);
  EXPECT_EQ(stats["executed"], 1);
  EXPECT_EQ(stats["skipped"], 5);

  r = runCli({"batch", "--manifest", path("m.json"), "--out", path("b"), "--workers", "2"});
  ASSERT_EQ(r.code, 0);
  for (int i = 0; i < 6; ++i) {
    const std::string name = "t" + std::to_string(i) + ".png";
    EXPECT_EQ(slurp(path("a/" + name)), slurp(path("b/" + name))) << name;
  }
  // Digests in the summary match across runs even though statuses differ.
  auto digests = [](const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) out.push_back(line.substr(line.rfind(',') + 1));
    return out;
  };
  auto a_digests = digests(slurp(path("a/summary.csv")));
  auto b_digests = digests(slurp(path("b/summary.csv")));
  EXPECT_EQ(a_digests, b_digests);
  EXPECT_NE(summary_before, slurp(path("a/summary.csv")));
}

TEST_F(CliTest, BatchRejectsReservedKeysAndNesting) {
  spit(path("m.json"), R"({"entries":[{"id":"x","command":"terrain-eval","args":{"out":"y.png"}}]})");
  EXPECT_EQ(runCli({"batch", "--manifest", path("m.json"), "--out", path("o")}).code, 3);
  spit(path("m.json"), R"({"entries":[{"id":"x","command":"batch","args":{}}]})");
  EXPECT_EQ(runCli({"batch", "--manifest", path("m.json"), "--out", path("o")}).code, 3);
  spit(path("m.json"), R"({"entries":[{"id":"x","command":"gate"},{"id":"x","command":"gate"}]})");
  EXPECT_EQ(runCli({"batch", "--manifest", path("m.json"), "--out", path("o")}).code, 3);
}
