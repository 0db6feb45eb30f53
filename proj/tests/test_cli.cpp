#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;
using namespace jetlab::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "jetlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::complex<double> entry(const json& m, int i, int j) {
  const auto& e = m["entries"][i][j];
  return {e[0].get<double>(), e[1].get<double>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

#ifdef JETLAB_BIN
std::pair<int, std::string> run_binary(const std::string& args) {
  const std::string cmd = std::string(JETLAB_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}
#endif

}  // namespace

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("1"), std::complex<double>(1, 0));
  EXPECT_EQ(parse_complex("-0.5"), std::complex<double>(-0.5, 0));
  EXPECT_EQ(parse_complex("2i"), std::complex<double>(0, 2));
  EXPECT_EQ(parse_complex("-i"), std::complex<double>(0, -1));
  EXPECT_EQ(parse_complex("1+2i"), std::complex<double>(1, 2));
  EXPECT_EQ(parse_complex("3.5e-1-4i"), std::complex<double>(0.35, -4));
  EXPECT_EQ(parse_complex("1e+2+1e-1i"), std::complex<double>(100, 0.1));
  EXPECT_THROW(parse_complex("abc"), UsageError);
  EXPECT_THROW(parse_complex(""), UsageError);
  EXPECT_THROW(parse_complex("1+2j"), UsageError);
}

TEST(ParsePoints, CoordinatesAndErrors) {
  const auto z = parse_points("0/1i, 2/3", 2);
  EXPECT_EQ(z.n(), 2);
  EXPECT_EQ(z.coordinate(0, 1), std::complex<double>(0, 1));
  EXPECT_EQ(z.coordinate(1, 0), std::complex<double>(2, 0));
  EXPECT_THROW(parse_points("0,1", 2), UsageError);
  EXPECT_THROW(parse_points("", 1), UsageError);
  EXPECT_THROW(parse_points("0,,1", 1), UsageError);
}

TEST(ParseLists, IntsAndGrid) {
  EXPECT_EQ(parse_int_list("16,64, 256"), (std::vector<int>{16, 64, 256}));
  EXPECT_TRUE(parse_int_list("").empty());
  EXPECT_THROW(parse_int_list("4,x"), UsageError);
  EXPECT_THROW(parse_int_list("-4"), UsageError);
  const Grid g = parse_grid("-2:2:5");
  EXPECT_EQ(g.lo, -2.0);
  EXPECT_EQ(g.hi, 2.0);
  EXPECT_EQ(g.count, 5);
  EXPECT_THROW(parse_grid("0:1"), UsageError);
  EXPECT_THROW(parse_grid("0:1:0"), UsageError);
}

TEST(LimitCov, SinglePointJson) {
  const auto r = run_cli({"limit-cov", "--m", "1", "--points", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["command"], "limit-cov");
  EXPECT_EQ(doc["layout"]["size"], 3);
  EXPECT_EQ(doc["layout"]["slots"][2]["kind"], "antiholomorphic");
  const auto& m = doc["data"];
  EXPECT_EQ(m["rows"], 3);
  EXPECT_NEAR(entry(m, 0, 0).real(), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(entry(m, 1, 1).real(), 1.0 / std::numbers::pi, 1e-15);
  EXPECT_EQ(entry(m, 2, 2), std::complex<double>(0.0));
}

TEST(LimitCov, TwoPoints) {
  const auto r = run_cli({"limit-cov", "--m", "1", "--points", "0,1"});
  ASSERT_EQ(r.code, 0);
  const auto m = json::parse(r.out)["data"];
  EXPECT_EQ(m["rows"], 6);
  EXPECT_NEAR(std::abs(entry(m, 0, 1)), std::exp(-0.5) / std::numbers::pi, 1e-15);
}

TEST(LimitCov, MissingPointsIsUsageError) {
  const auto r = run_cli({"limit-cov", "--m", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({"limit-cov", "--points", "0,zz"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"nonsense"}).code, 2);
}

TEST(ExactCov, MatchesClosedFormAtOrigin) {
  const auto r = run_cli({"exact-cov", "--points", "0", "--N", "40"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_NEAR(entry(doc["data"], 0, 0).real(), 40.0 / (41.0 * std::numbers::pi), 1e-14);
  EXPECT_EQ(doc["config"]["model"], "bargmann-fock");
  EXPECT_EQ(run_cli({"exact-cov", "--points", "0"}).code, 2);
  EXPECT_EQ(run_cli({"exact-cov", "--points", "0/0", "--m", "2", "--N", "4", "--model", "fs"}).code, 2);
  EXPECT_EQ(run_cli({"exact-cov", "--points", "0", "--N", "4", "--model", "cubic"}).code, 2);
}

TEST(McCov, LawsAndSampleFloor) {
  const auto r = run_cli({"mc-cov", "--points", "0", "--N", "8", "--law", "spherical", "--samples", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["config"]["law"], "spherical");
  EXPECT_EQ(run_cli({"mc-cov", "--points", "0", "--N", "8", "--samples", "9"}).code, 2);
  EXPECT_EQ(run_cli({"mc-cov", "--points", "0", "--N", "8", "--law", "cauchy"}).code, 2);
}

TEST(Converge, CsvTable) {
  const auto r = run_cli({"converge", "--model", "bf", "--m", "1", "--points", "0,1", "--Ns", "16,64,256"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[0], "N,frobenius,spectral,seconds");
  double previous = 1e300;
  for (int i = 1; i <= 3; ++i) {
    std::istringstream row(ls[i]);
    std::string n, frob;
    std::getline(row, n, ',');
    std::getline(row, frob, ',');
    EXPECT_LT(std::stod(frob), previous);
    previous = std::stod(frob);
  }
  EXPECT_EQ(ls[4].rfind("# slope=", 0), 0u);
}

TEST(Converge, Errors) {
  EXPECT_EQ(run_cli({"converge", "--points", "0", "--Ns", ""}).code, 2);
  EXPECT_EQ(run_cli({"converge", "--points", "0", "--Ns", "64,16"}).code, 2);
  EXPECT_EQ(run_cli({"converge", "--points", "0", "--Ns", "2"}).code, 2);
  EXPECT_EQ(run_cli({"converge", "--points", "0", "--Ns", "8", "--comparison", "other"}).code, 2);
}

TEST(Converge, JsonFormat) {
  const auto r = run_cli({"converge", "--points", "0", "--Ns", "8,16", "--format", "json", "--timing"});
  ASSERT_EQ(r.code, 0);
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["data"]["rows"].size(), 2u);
  EXPECT_TRUE(doc["data"]["rows"][0]["seconds"].is_number());
}

TEST(Pb, LargeDimensionRow) {
  const auto r = run_cli({"pb", "--d", "1000", "--k", "1", "--samples", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_LT(std::stod(ls[1].substr(ls[1].rfind(',') + 1)), 0.01);
  EXPECT_EQ(run_cli({"pb", "--d", "3", "--k", "2"}).code, 2);
}

TEST(Density, ArchimedesGrid) {
  const auto r = run_cli({"density", "--d", "3", "--k", "1", "--grid", "-1.5:1.5:5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6u);
  for (int i = 1; i <= 5; ++i) {
    EXPECT_NEAR(std::stod(ls[i].substr(ls[i].find(',') + 1)), 1.0 / (2.0 * std::sqrt(3.0)), 1e-15);
  }
  // Grid points at |x| = 2 fall outside the support [-sqrt 3, sqrt 3].
  const auto wide = lines(run_cli({"density", "--d", "3", "--k", "1", "--grid", "-2:2:5"}).out);
  EXPECT_EQ(wide[1], "-2,0");
  EXPECT_EQ(run_cli({"density", "--d", "3", "--k", "2", "--grid", "0:1:2"}).code, 2);
  EXPECT_EQ(run_cli({"density", "--d", "5", "--grid", "0:1"}).code, 2);
}

TEST(Density, TwoDimensionalGridSize) {
  const auto r = run_cli({"density", "--d", "8", "--k", "2", "--grid", "-1:1:4", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["data"]["values"].size(), 16u);
}

TEST(Sample, LimitSamplesHaveZeroThirdSlot) {
  const auto r = run_cli({"sample", "--m", "1", "--points", "0", "--limit", "--count", "3", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  ASSERT_EQ(doc["data"].size(), 3u);
  for (const auto& jet : doc["data"]) {
    ASSERT_EQ(jet.size(), 3u);
    EXPECT_EQ(jet[2][0].get<double>(), 0.0);
    EXPECT_EQ(jet[2][1].get<double>(), 0.0);
  }
  EXPECT_EQ(run_cli({"sample", "--points", "0"}).code, 2);
}

TEST(Output, WritesFile) {
  const std::string path = ::testing::TempDir() + "jetlab_cli_out.json";
  const auto r = run_cli({"limit-cov", "--points", "0", "--out", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(json::parse(ss.str())["command"], "limit-cov");
  std::remove(path.c_str());
  EXPECT_EQ(run_cli({"limit-cov", "--points", "0", "--out", "/nonexistent-dir/x.json"}).code, 1);
}

#ifdef JETLAB_BIN
TEST(Binary, ByteIdenticalSphericalConverge) {
  const std::string args =
      "converge --model bf --m 1 --points 0,1 --Ns 16,64 --comparison spherical-mc --samples 100000 --seed 7";
  const auto a = run_binary(args);
  const auto b = run_binary(args);
  EXPECT_EQ(a.first, 0);
  EXPECT_EQ(a.second, b.second);
  EXPECT_EQ(lines(a.second).size(), 4u);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_binary("limit-cov --m 1 --points 0").first, 0);
  EXPECT_EQ(run_binary("limit-cov --m 1").first, 2);
  EXPECT_EQ(run_binary("converge --points 0 --Ns ''").first, 2);
  EXPECT_EQ(run_binary("limit-cov --points 0 --out /nonexistent-dir/x").first, 1);
  EXPECT_EQ(run_binary("--help").first, 0);
}
#endif
