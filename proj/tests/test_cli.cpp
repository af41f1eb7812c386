#include "cli.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using nlohmann::json;
using rankdist::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, DistUniform) {
  const auto r = invoke({"dist", "--ensemble", "uniform", "--m", "0", "--q", "2", "--n", "2", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["probs"], (json{"3/8", "9/16", "1/16"}));
}

TEST(Cli, DistSkewCentroPointMass) {
  const auto r = invoke({"dist", "--ensemble", "skewcentro", "--q", "3", "--n", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["probs"], (json{"1/1"}));
}

TEST(Cli, DistFormulaOnlyFlag) {
  const auto r = invoke({"dist", "--ensemble", "hermitian", "--q", "2", "--n", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["field_realizable"], false);
}

TEST(Cli, DistCsvAndTable) {
  const auto csv = invoke({"dist", "--q", "2", "--n", "1", "--format", "csv"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("k,prob,approx\n0,1/2,", 0), 0u) << csv.out;
  const auto table = invoke({"dist", "--q", "2", "--n", "1", "--format", "table"});
  ASSERT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("k=0"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({"verify", "--ensemble", "uniform", "--q", "2", "--n", "0"}).code, 2);
  EXPECT_EQ(invoke({"sample", "--trials", "0"}).code, 2);
  EXPECT_EQ(invoke({"bench", "--sizes", ""}).code, 2);
  EXPECT_EQ(invoke({"dist", "--ensemble", "orthogonal", "--q", "2", "--n", "2"}).code, 2);
  EXPECT_EQ(invoke({"dist", "--format", "xml"}).code, 2);
  EXPECT_EQ(invoke({"nonsense"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"sample", "--ensemble", "skewcentro", "--q", "4", "--n", "3", "--trials", "10"}).code, 2);
}

TEST(Cli, VerifyRefinedHermitian) {
  const auto r = invoke({"verify", "--ensemble", "hermitian", "--q", "3", "--n", "2", "--refined", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const json j = json::parse(r.out);
  bool refined = false;
  for (const auto& c : j["checks"])
    if (c["name"].get<std::string>().find("(refined)") != std::string::npos) refined = c["pass"].get<bool>();
  EXPECT_TRUE(refined);
  EXPECT_EQ(invoke({"verify", "--ensemble", "hermitian", "--q", "2", "--n", "2", "--refined"}).code, 2);
}

TEST(Cli, VerifyAllDeskGrid) {
  const auto r = invoke({"verify", "--all", "--qmax", "5", "--nmax", "10", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["failures"], 0);
  EXPECT_GT(j["checks"].size(), 1000u);
}

TEST(Cli, TvAndLimitAndStein) {
  const auto tv = invoke({"tv", "--q", "2", "--n", "1"});
  ASSERT_EQ(tv.code, 0) << tv.err;
  EXPECT_EQ(json::parse(tv.out)["window"]["hi"], "3/4");

  const auto lim = invoke({"limit", "--q", "2", "--trunc-k", "6"});
  ASSERT_EQ(lim.code, 0) << lim.err;
  EXPECT_EQ(json::parse(lim.out)["probs"].size(), 7u);

  const auto st = invoke({"stein", "--q", "2", "--kmax", "20", "--target", "0,2"});
  ASSERT_EQ(st.code, 0) << st.err;
  const json sj = json::parse(st.out);
  EXPECT_EQ(sj["pass"], true);
  EXPECT_TRUE(sj.contains("solution"));

  const auto mo = invoke({"moments", "--ensemble", "zerodiag", "--q", "3", "--n", "6"});
  EXPECT_EQ(mo.code, 0) << mo.err;
}

TEST(Cli, SampleDeterministic) {
  const std::vector<std::string> args{"sample", "--ensemble", "uniform", "--m", "0", "--q", "2", "--n", "6",
                                      "--trials", "100000", "--seed", "7", "--workers", "2"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_LT(json::parse(a.out)["empirical_tv"].get<double>(), 0.02);

  const auto skew = invoke({"sample", "--ensemble", "zerodiag", "--q", "3", "--n", "4", "--realize", "skew",
                            "--trials", "20000"});
  ASSERT_EQ(skew.code, 0) << skew.err;
  EXPECT_LT(json::parse(skew.out)["empirical_tv"].get<double>(), 0.05);
}

TEST(Cli, MarkovAndBench) {
  const auto mk = invoke({"markov", "--q", "2", "--n", "4", "--steps", "20000"});
  ASSERT_EQ(mk.code, 0) << mk.err;
  EXPECT_TRUE(json::parse(mk.out).contains("simulation"));

  const auto bench = invoke({"bench", "--sizes", "64,128"});
  ASSERT_EQ(bench.code, 0) << bench.err;
  EXPECT_EQ(bench.out.rfind("size,rank_packed,rank_generic", 0), 0u);
}

TEST(Cli, OutFile) {
  const auto path = std::filesystem::temp_directory_path() / "rankdist_cli_out.json";
  std::filesystem::remove(path);
  const auto r = invoke({"dist", "--q", "3", "--n", "2", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const json j = json::parse(in);
  EXPECT_EQ(j["q"], 3);
  std::filesystem::remove(path);
}
