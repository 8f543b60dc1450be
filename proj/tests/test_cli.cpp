#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = SIZEFN_CLI_PATH;
const std::string kData = SIZEFN_DATA_DIR;

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr
};

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sizefn_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const fs::path& dir) {
  const auto log = dir / "log.txt";
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST(Cli, CornersOnWPath) {
  const auto dir = scratch("corners");
  const auto r = run("corners --input " + kData + "/wpath.json --out " + dir.string(), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = read_json(dir / "series.json");
  ASSERT_EQ(j["cornerpoints"].size(), 3u);
  EXPECT_EQ(j["cornerpoints"][0]["x"], 0.0);
  EXPECT_EQ(j["cornerpoints"][0]["y"], 2.0);
  EXPECT_EQ(j["cornerpoints"][1]["y"], "inf");
  EXPECT_EQ(j["cornerpoints"][2]["x"], 1.0);
}

TEST(Cli, CornersCsv) {
  const auto dir = scratch("corners_csv");
  const auto r = run("corners --input " + kData + "/wpath.json --format csv --out " + dir.string(), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto text = slurp(dir / "series.csv");
  EXPECT_NE(text.find("inf"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Cli, MatchIdenticalIsZero) {
  const auto dir = scratch("match_same");
  const auto r = run("match --input " + kData + "/wpath_lift.json --input2 " + kData +
                         "/wpath_lift.json --sample 5 --seed 3 --out " + dir.string(),
                     dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = read_json(dir / "match.json");
  EXPECT_EQ(j["max"], 0.0);
  EXPECT_EQ(j["pairs"].size(), 5u);
}

TEST(Cli, MatchShiftIsBounded) {
  // A uniform shift by 0.125 moves F by at most 0.125 / min l.
  const auto dir = scratch("match_shift");
  const auto r = run("match --input " + kData + "/wpath_lift.json --input2 " + kData +
                         "/wpath_shift.json --sample 12 --strategy random --seed 8 --out " + dir.string(),
                     dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = read_json(dir / "match.json");
  for (const auto& e : j["pairs"]) {
    const double l0 = e["pair"]["l"][0], l1 = e["pair"]["l"][1];
    EXPECT_LE(e["d_match"].get<double>(), 0.125 / std::min(l0, l1) + 1e-9);
  }
}

TEST(Cli, DiagonalPairFile) {
  const auto dir = scratch("pairs_file");
  const auto r = run("match --input " + kData + "/wpath_lift.json --input2 " + kData +
                         "/wpath_shift.json --pairs " + kData + "/diagonal_pair.json --out " + dir.string(),
                     dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = read_json(dir / "match.json");
  ASSERT_EQ(j["pairs"].size(), 1u);
  EXPECT_NEAR(j["max"].get<double>(), 0.125 * std::sqrt(2.0), 1e-12);
}

TEST(Cli, DeterministicOutputs) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(run("sample-pairs --k 3 --sample 7 --strategy random --seed 42 --out " + dir.string(), dir).code, 0);
    ASSERT_EQ(run("match --input " + kData + "/wpath_lift.json --input2 " + kData +
                      "/wpath_shift.json --sample 6 --strategy random --seed 42 --out " + dir.string(),
                  dir)
                  .code,
              0);
  }
  EXPECT_EQ(slurp(a / "pairs.json"), slurp(b / "pairs.json"));
  EXPECT_EQ(slurp(a / "match.json"), slurp(b / "match.json"));
  const auto c = scratch("det_c");
  ASSERT_EQ(run("sample-pairs --k 3 --sample 7 --strategy random --seed 43 --out " + c.string(), c).code, 0);
  EXPECT_NE(slurp(a / "pairs.json"), slurp(c / "pairs.json"));
}

TEST(Cli, SamplingStrategyDefaultsByArity) {
  const auto dir = scratch("strategy");
  ASSERT_EQ(run("sample-pairs --k 3 --sample 4 --out " + dir.string(), dir).code, 0);
  const auto j = read_json(dir / "pairs.json");
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[0]["l"].size(), 3u);
  EXPECT_EQ(run("sample-pairs --k 3 --sample 4 --strategy grid --out " + dir.string(), dir).code, 2);
  ASSERT_EQ(run("sample-pairs --k 2 --sample 9 --out " + dir.string(), dir).code, 0);
  EXPECT_EQ(read_json(dir / "pairs.json").size(), 9u);
}

TEST(Cli, ReduceWritesValues) {
  const auto dir = scratch("reduce");
  const auto r = run("reduce --input " + kData + "/wpath_lift.json --pairs " + kData +
                         "/diagonal_pair.json --out " + dir.string(),
                     dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto j = read_json(dir / "reduced.json");
  ASSERT_EQ(j["values"].size(), 5u);
  EXPECT_NEAR(j["values"][1].get<double>(), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Cli, MissingFileExitsOne) {
  const auto dir = scratch("missing");
  const auto r = run("corners --input /nonexistent/x.json --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("error"), std::string::npos);
}

TEST(Cli, MalformedJsonExitsOne) {
  const auto dir = scratch("malformed");
  EXPECT_EQ(run("corners --input " + kData + "/malformed.json --out " + dir.string(), dir).code, 1);
}

TEST(Cli, InvariantViolationExitsTwo) {
  const auto dir = scratch("bad_edge");
  const auto r = run("corners --input " + kData + "/bad_edge.json --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("index out of range"), std::string::npos) << r.output;
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto dir = scratch("usage");
  const std::string in = " --input " + kData + "/wpath_lift.json --out " + dir.string();
  EXPECT_EQ(run("match" + in + " --pairs " + kData + "/diagonal_pair.json --sample 3", dir).code, 2);
  EXPECT_EQ(run("corners" + in + " --strategy spiral", dir).code, 2);
  EXPECT_EQ(run("dd" + in + " --input2 " + kData + "/wpath_lift.json --s-range 1:0 --t-range 0:1", dir).code, 2);
  EXPECT_EQ(run("nonsense", dir).code, 2);
  EXPECT_EQ(run("match" + in, dir).code, 2);
}

TEST(Cli, VerifyNeedsGeometry) {
  const auto dir = scratch("verify_graph");
  const auto r = run("verify --input " + kData + "/wpath_lift.json --out " + dir.string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("geometry required"), std::string::npos) << r.output;
}

TEST(Cli, MeshVerifyAndUnexplainedExitCode) {
  const auto dir = scratch("verify_mesh");
  ASSERT_EQ(run("mesh --shape sphere --subdiv 3 --out " + dir.string(), dir).code, 0);
  const auto off = (dir / "sphere.off").string();
  ASSERT_TRUE(fs::exists(dir / "sphere.csv"));
  const auto ok = run("verify --input " + off + " --sample 6 --out " + dir.string(), dir);
  ASSERT_EQ(ok.code, 0) << ok.output;
  const auto j = read_json(dir / "verify.json");
  EXPECT_TRUE(j["unexplained"].empty());
  EXPECT_GT(j["coordinates"].get<int>(), 0);
  const auto strict = run("verify --input " + off + " --sample 6 --tau-match 0 --out " + dir.string(), dir);
  EXPECT_EQ(strict.code, 3) << strict.output;
  EXPECT_FALSE(read_json(dir / "verify.json")["unexplained"].empty());
}

TEST(Cli, PseudocritReport) {
  const auto dir = scratch("pseudo");
  ASSERT_EQ(run("mesh --shape sphere --subdiv 2 --function xz --out " + dir.string(), dir).code, 0);
  const auto off = (dir / "sphere.off").string();
  ASSERT_EQ(run("pseudocrit --input " + off + " --rho 0,1 --out " + dir.string(), dir).code, 0);
  const auto j = read_json(dir / "pseudocritical.json");
  ASSERT_FALSE(j["pseudocritical"].empty());
  EXPECT_TRUE(j["special"].contains("0"));
  EXPECT_EQ(run("pseudocrit --input " + off + " --rho 0,5 --out " + dir.string(), dir).code, 2);
}

TEST(Cli, DdSelfDistanceIsZero) {
  const auto dir = scratch("dd");
  const auto in = kData + "/wpath_lift.json";
  const auto r = run("dd --input " + in + " --input2 " + in + " --sample 3 --grid 50 --out " + dir.string(), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_json(dir / "dd.json")["d_D"], 0.0);
}

TEST(Cli, PlotLabelsEveryRegionValue) {
  const auto dir = scratch("plot");
  ASSERT_EQ(run("corners --input " + kData + "/wpath.json --out " + dir.string(), dir).code, 0);
  const auto r = run("plot --series " + (dir / "series.json").string() + " --out " + dir.string(), dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto svg = slurp(dir / "regions.svg");
  std::set<std::string> labels;
  const std::regex label_re(R"(class="region-label"[^>]*>([0-9]+)<)");
  for (std::sregex_iterator it(svg.begin(), svg.end(), label_re), end; it != end; ++it) labels.insert((*it)[1]);
  EXPECT_EQ(labels, (std::set<std::string>{"0", "1", "2", "3"}));
  EXPECT_NE(slurp(dir / "diagram.svg").find("<svg"), std::string::npos);
}
