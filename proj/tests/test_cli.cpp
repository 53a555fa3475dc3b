#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtcm/app/commands.hpp"

using namespace dtcm::app;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "dtcm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

}  // namespace

TEST(CliProb, ThreeSpinExample) {
  const CliRun r = run({"prob", "--ns", "3", "--i", "101", "--f", "000", "--g", "0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "q2*p2*q3 = 0.17850044074237012\n");
}

TEST(CliProb, SevenSpinExample) {
  const CliRun r = run({"prob", "--ns", "7", "--i", "0010100", "--f", "1101011", "--g", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "q3*q4^5*q5 = 0.9814167328158462\n");
}

TEST(CliProb, ZeroCouplingGivesZeroOrOne) {
  EXPECT_EQ(run({"prob", "--i", "101", "--f", "000", "--g", "0"}).out, "q2*p2*q3 = 0\n");
  EXPECT_EQ(run({"prob", "--i", "101", "--f", "101", "--g", "0"}).out, "p1*p2^2 = 1\n");
}

TEST(CliProb, SpinFlagAndCsv) {
  const CliRun r = run({"prob", "--s", "3/2", "--i", "101", "--f", "000", "--g", "0.1,0.3", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "# dtcm=0.1.0 command=prob ns=3 nb=0 g=0.1,0.3 i=101 f=000 format=csv");
  EXPECT_EQ(l[1], "g,initial,final,monomial,probability");
  EXPECT_EQ(l[3], "0.3,101,000,q2*p2*q3,0.17850044074237012");
}

TEST(CliParse, SpinValues) {
  EXPECT_EQ(parse_spin("15/2"), 15);
  EXPECT_EQ(parse_spin("7.5"), 15);
  EXPECT_EQ(parse_spin("3"), 6);
  EXPECT_EQ(parse_spin("200"), 400);
  EXPECT_THROW(parse_spin("1/3"), std::invalid_argument);
  EXPECT_THROW(parse_spin("0.25"), std::invalid_argument);
  EXPECT_THROW(parse_spin("0"), std::invalid_argument);
  EXPECT_THROW(parse_spin("x"), std::invalid_argument);
}

TEST(CliParse, G2Grid) {
  const auto v = parse_g2_grid("0:0.25:0.0025");
  ASSERT_EQ(v.size(), 101u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_NEAR(v.back(), 0.25, 1e-15);
  EXPECT_EQ(parse_g2_grid("0.5:0.5:1").size(), 1u);
  EXPECT_THROW(parse_g2_grid("0:1"), std::invalid_argument);
  EXPECT_THROW(parse_g2_grid("1:0:0.1"), std::invalid_argument);
  EXPECT_THROW(parse_g2_grid("0:1:0"), std::invalid_argument);
  EXPECT_THROW(parse_g2_grid("-1:1:0.5"), std::invalid_argument);
  EXPECT_THROW(parse_g2_grid("0:1:1e-9"), std::invalid_argument);
}

TEST(CliDist, ColumnsAndFooterSums) {
  const CliRun r = run({"dist", "--s", "15/2", "--g", "0.1,0.2,0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 1u + 1u + 3u * 16u + 3u);
  EXPECT_EQ(l[1], "g,nu,f,exact,continuous,gaussian,euler");
  EXPECT_EQ(l[l.size() - 3].rfind("# sums g=0.1: exact=", 0), 0u);
  // exact column sums to one for each coupling
  for (std::size_t k = l.size() - 3; k < l.size(); ++k) {
    const auto pos = l[k].find("exact=") + 6;
    EXPECT_NEAR(std::stod(l[k].substr(pos)), 1.0, 1e-12) << l[k];
  }
}

TEST(CliDist, ApproximationsBlankWithBosons) {
  const CliRun r = run({"dist", "--ns", "2", "--nb", "1", "--g", "0.3", "--process", "inverse"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  EXPECT_EQ(l[1], "g,nu,exact,continuous,gaussian,largeg");
  EXPECT_EQ(l[2].substr(l[2].size() - 3), ",,,");
}

TEST(CliMean, ZeroCouplingRows) {
  const CliRun f = run({"mean", "--ns", "400", "--g2-grid", "0:0.01:0.01"});
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(lines(f.out)[2].rfind("0,0,0,", 0), 0u);
  const CliRun i = run({"mean", "--ns", "400", "--g2-grid", "0:0.01:0.01", "--process", "inverse"});
  ASSERT_EQ(i.code, 0) << i.err;
  EXPECT_EQ(lines(i.out)[2].rfind("0,0,400,", 0), 0u);
}

TEST(CliMean, GridValuesPrintedVerbatim) {
  const CliRun r = run({"mean", "--ns", "15", "--g2-grid", "0:0.1:0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out)[3].rfind("0.05,", 0), 0u);
}

TEST(CliJson, Structure) {
  const CliRun r = run({"mean", "--ns", "15", "--process", "inverse", "--g", "0,0.3", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["meta"]["command"], "mean");
  ASSERT_EQ(doc["rows"].size(), 2u);
  EXPECT_TRUE(doc["rows"][0]["gaussian"].is_null());
  EXPECT_DOUBLE_EQ(doc["rows"][0]["n_b_exact"].get<double>(), 15.0);
  EXPECT_EQ(doc["rows"][1]["strong_coupling"], true);
}

TEST(CliSweep, GridOrder) {
  const CliRun r = run({"sweep", "--ns", "2,4", "--g", "0,0.2", "--threads", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[1], "ns,g,mean,variance,mode,p_mode,total");
  EXPECT_EQ(l[2].rfind("2,0,", 0), 0u);
  EXPECT_EQ(l[5].rfind("4,0.2,", 0), 0u);
}

TEST(CliFigure, PresetMatchesExplicitCommand) {
  const CliRun a = run({"figure", "--preset", "dist-forward-small"});
  const CliRun b = run({"dist", "--ns", "15", "--g", "0.1,0.2,0.3"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const CliRun c = run({"figure", "--preset", "mean-inverse-strong"});
  const CliRun d = run({"mean", "--s", "200", "--process", "inverse", "--g2-grid", "0.25:1:0.0125"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out, d.out);
}

TEST(CliFigure, EveryPresetRuns) {
  for (const auto& name : preset_names()) {
    const RunSpec spec = preset(name);
    EXPECT_NO_THROW(describe(spec)) << name;
    EXPECT_FALSE(spec.couplings.empty()) << name;
  }
  EXPECT_EQ(run({"figure", "--preset", "nope"}).code, 2);
}

TEST(CliDeterminism, ThreadCountDoesNotChangeBytes) {
  const CliRun one = run({"mean", "--s", "200", "--g2-grid", "0:0.25:0.005", "--threads", "1"});
  const CliRun four = run({"mean", "--s", "200", "--g2-grid", "0:0.25:0.005", "--threads", "4"});
  const CliRun again = run({"mean", "--s", "200", "--g2-grid", "0:0.25:0.005", "--threads", "4"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(four.out, again.out);
}

TEST(CliOracle, PassesAndReportsExtrapolation) {
  const CliRun r = run({"oracle", "--ns", "2", "--g", "0.3", "--T-schedule", "100,200"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  EXPECT_EQ(l[1], "g,final,bosons,exact,p_T100,p_T200,extrapolated,abs_diff");
  EXPECT_EQ(l.back(), "# pass: true");
}

TEST(CliOracle, ToleranceMissExitsThree) {
  const CliRun r = run({"oracle", "--ns", "2", "--g", "0.3", "--T-schedule", "5,10"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("exceeds tolerance"), std::string::npos);
  EXPECT_EQ(lines(r.out).back(), "# pass: false");
}

TEST(CliOracle, BadInitialStateExitsTwo) {
  EXPECT_EQ(run({"oracle", "--ns", "2", "--g", "0.3", "--i", "1", "--T-schedule", "50,100"}).code, 2);
  EXPECT_EQ(run({"oracle", "--ns", "2", "--g", "0.3", "--T-schedule", "100,50"}).code, 2);
}

TEST(CliErrors, FlagAndDomainErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"prob", "--i", "12", "--f", "00", "--g", "1"}).code, 2);
  EXPECT_EQ(run({"prob", "--ns", "4", "--i", "101", "--f", "000", "--g", "1"}).code, 2);
  EXPECT_EQ(run({"dist", "--ns", "3", "--g", "0.2,0.1"}).code, 2);
  EXPECT_EQ(run({"dist", "--ns", "3", "--g", "-0.1"}).code, 2);
  EXPECT_EQ(run({"dist", "--ns", "3", "--g", "0.1", "--tol", "-1"}).code, 2);
  EXPECT_EQ(run({"dist", "--ns", "3", "--g", "0.1", "--format", "text"}).code, 2);
  EXPECT_EQ(run({"dist", "--ns", "3", "--s", "3/2", "--g", "0.1"}).code, 2);
  EXPECT_EQ(run({"mean", "--ns", "3", "--g", "0.1", "--g2-grid", "0:1:0.5"}).code, 2);
  EXPECT_EQ(run({"mean", "--ns", "3"}).code, 2);
  EXPECT_EQ(run({"dist", "--g", "0.1"}).code, 2);
  EXPECT_EQ(run({"dist", "--ns", "3", "--g", "0.1", "--process", "sideways"}).code, 2);
}

TEST(CliErrors, HelpAndVersionExitZero) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const CliRun v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "0.1.0\n");
}

TEST(CliOutput, WritesFile) {
  const std::string path = ::testing::TempDir() + "dtcm_cli_out.csv";
  const CliRun r = run({"dist", "--ns", "3", "--g", "0.3", "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  EXPECT_EQ(content.str(), run({"dist", "--ns", "3", "--g", "0.3"}).out);
  std::remove(path.c_str());
}
