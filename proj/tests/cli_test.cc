// Copyright 2026 The crowdmech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "crowdmech/report.h"
#include "test_util.h"

namespace crowdmech {
namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Ex6() { return testing::FixturePath("ex6_edges.txt"); }

std::string WriteTemp(const std::string& name, const std::string& body) {
  std::string path = ::testing::TempDir() + "/" + name;
  std::ofstream(path) << body;
  return path;
}

TEST(CliTest, TenmOnExample) {
  Result r = Invoke({"tenm", "--graph", Ex6(), "--budget", "12"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["selected"], Json::array({1, 6}));
  EXPECT_EQ(j["payments"]["1"], 2);
  EXPECT_EQ(j["payments"]["6"], 3);
  EXPECT_EQ(j["total_payment"], 5);
}

TEST(CliTest, CostFileMatchesEmbeddedCosts) {
  Result a = Invoke({"tenm", "--graph", Ex6(), "--budget", "12"});
  Result b = Invoke({"tenm", "--graph", Ex6(), "--budget", "12", "--costs",
                  testing::FixturePath("ex6_costs.csv")});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_EQ(Json::parse(a.out)["payments"],
            Json::parse(b.out)["payments"]);
}

TEST(CliTest, EstimateHalfOfNeighbors) {
  Result r = Invoke({"estimate", "--degree", "4", "--p", "0.5"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_DOUBLE_EQ(Json::parse(r.out)["expected_notified"], 2.0);
}

TEST(CliTest, ConfigErrorsExitOne) {
  EXPECT_EQ(Invoke({}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"bogus"}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"tenm", "--budget", "12"}).code, kExitConfigError);
  EXPECT_EQ(Invoke({"tenm", "--graph", "/nonexistent", "--budget", "12"}).code,
            kExitConfigError);
  EXPECT_EQ(Invoke({"tenm", "--graph", Ex6(), "--budget", "-3"}).code,
            kExitConfigError);
  EXPECT_EQ(Invoke({"tenm", "--graph", Ex6(), "--budget", "12", "--cost-range",
                 "50:20"})
                .code,
            kExitConfigError);
  EXPECT_EQ(Invoke({"experiment", "--deviation-frac", "2"}).code,
            kExitConfigError);
  EXPECT_EQ(Invoke({"tenm", "--graph", Ex6(), "--budget", "12", "--format",
                 "xml"})
                .code,
            kExitConfigError);
}

TEST(CliTest, NonTerminatingAuctionExitsTwo) {
  std::string script = WriteTemp(
      "loop.csv", "pass,device,tasks\n1,0,1\n1,1,1\n2,0,1\n2,1,1\n");
  Result r = Invoke({"wipd", "--script", script, "--tasks", "1", "--devices",
                  "2", "--max-rounds", "2"});
  EXPECT_EQ(r.code, kExitInvariantViolation);
  EXPECT_NE(r.err.find("did not terminate"), std::string::npos);
}

TEST(CliTest, ScriptedAuctionCsv) {
  Result r = Invoke({"wipd", "--script", testing::FixturePath("script_8x3.csv"),
                  "--tasks", "8", "--devices", "3", "--max-rounds", "5",
                  "--format", "csv"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("1,wipd,bundle:1,\"{t1,t2,t3}\""), std::string::npos);
  EXPECT_NE(r.out.find("1,wipd,bundle:3,\"{t5,t7}\""), std::string::npos);
}

TEST(CliTest, EctaiReplay) {
  Result r = Invoke({"ectai", "--devices", "12", "--plan",
                  testing::FixturePath("example2_plan.csv"), "--peaks",
                  testing::FixturePath("example2_peaks.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(Json::parse(r.out)["ordered"],
            Json::array({4, 3, 10, 8}));
}

TEST(CliTest, OutFlagWritesFile) {
  std::string path = ::testing::TempDir() + "/graph_info.json";
  Result r = Invoke({"graph-info", "--graph", Ex6(), "--out", path});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(path);
  Json j = Json::parse(in);
  EXPECT_EQ(j["nodes"], 6);
}

// Every subcommand, same seed, 1 vs 8 workers: identical bytes.
TEST(CliTest, ByteIdenticalAcrossWorkers) {
  const std::vector<std::vector<std::string>> invocations = {
      {"graph-info", "--graph", Ex6()},
      {"tenm", "--graph", Ex6(), "--budget", "12", "--trace"},
      {"ntbfm", "--graph", Ex6(), "--budget", "12"},
      {"psm", "--graph", Ex6(), "--budget", "12"},
      {"ectai", "--devices", "50", "--seed", "3"},
      {"avr", "--devices", "50", "--seed", "3", "--dist", "normal"},
      {"wipd", "--tasks", "4", "--devices", "3", "--seed", "3", "--policy",
       "literal"},
      {"greedy", "--tasks", "5", "--devices", "4", "--seed", "3"},
      {"estimate", "--degree", "10", "--p", "0.3", "--trials", "5000",
       "--seed", "3"},
      {"experiment", "--mechanism", "tenm", "--nodes", "60", "--budget",
       "500", "--rounds", "2", "--deviation-frac", "0.3", "--seed", "3"},
      {"experiment", "--mechanism", "ectai", "--nodes", "40", "--rounds",
       "2", "--deviation-frac", "0.3", "--seed", "3", "--format", "csv"},
  };
  for (const auto& args : invocations) {
    std::vector<std::string> one = args, eight = args;
    one.insert(one.end(), {"--workers", "1"});
    eight.insert(eight.end(), {"--workers", "8"});
    Result a = Invoke(one), b = Invoke(eight), c = Invoke(one);
    EXPECT_EQ(a.code, kExitOk) << args[0] << ": " << a.err;
    EXPECT_EQ(a.out, b.out) << args[0];
    EXPECT_EQ(a.out, c.out) << args[0];
  }
}

}  // namespace
}  // namespace crowdmech
