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

#include "crowdmech/experiment.h"

#include <map>
#include <string>

#include "gtest/gtest.h"
#include "test_util.h"

namespace crowdmech {
namespace {

const Json* Metric(const RoundRecord& r, const std::string& name) {
  for (const auto& [key, value] : r.metrics) {
    if (key == name) return &value;
  }
  return nullptr;
}

ExperimentConfig Small(Mechanism m) {
  ExperimentConfig c;
  c.mechanism = m;
  c.synthetic_nodes = 40;
  c.edge_prob = 0.1;
  c.seed = 12;
  c.rounds = 3;
  c.budgets = {Rational(400)};
  return c;
}

TEST(ParseTest, MechanismAndDistributionNames) {
  for (Mechanism m : {Mechanism::kTenm, Mechanism::kNtbfm, Mechanism::kPsm,
                      Mechanism::kEctai, Mechanism::kAvr, Mechanism::kWipd,
                      Mechanism::kGreedy}) {
    EXPECT_EQ(*ParseMechanism(MechanismName(m)), m);
  }
  EXPECT_FALSE(ParseMechanism("vcg").ok());
  EXPECT_EQ(*ParseDistribution("normal"), Distribution::kNormal);
  EXPECT_FALSE(ParseDistribution("cauchy").ok());
}

TEST(ValidateExperimentConfigTest, RejectsBadValues) {
  ExperimentConfig c = Small(Mechanism::kTenm);
  EXPECT_TRUE(ValidateExperimentConfig(c).ok());
  c.deviation_frac = 1.5;
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
  c = Small(Mechanism::kTenm);
  c.value_range = {{50, 20}};
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
  c = Small(Mechanism::kTenm);
  c.rounds = 0;
  EXPECT_FALSE(ValidateExperimentConfig(c).ok());
  c = Small(Mechanism::kEctai);
  c.f = 30;
  c.g = 20;
  EXPECT_FALSE(RunExperiment(c).ok());
  c = Small(Mechanism::kTenm);
  c.graph_path = "/nonexistent.txt";
  EXPECT_FALSE(RunExperiment(c).ok());
}

class ExperimentAllMechanisms : public ::testing::TestWithParam<Mechanism> {};

TEST_P(ExperimentAllMechanisms, DeterministicAndComplete) {
  ExperimentConfig c = Small(GetParam());
  c.deviation_frac = 0.3;
  c.policy = DemandPolicy::kLiteral;
  ExperimentReport a = *RunExperiment(c);
  c.workers = 8;
  ExperimentReport b = *RunExperiment(c);
  c.workers = 1;
  EXPECT_EQ(ExperimentReportJson(a).dump(), ExperimentReportJson(b).dump());
  ASSERT_EQ(a.rounds.size(), 3u);
  for (const RoundRecord& r : a.rounds) {
    EXPECT_NE(Metric(r, "total_utility"), nullptr);
    EXPECT_NE(Metric(r, "winners"), nullptr);
    EXPECT_FALSE(r.violation.has_value()) << *r.violation;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Mechanisms, ExperimentAllMechanisms,
    ::testing::Values(Mechanism::kTenm, Mechanism::kNtbfm, Mechanism::kPsm,
                      Mechanism::kEctai, Mechanism::kAvr, Mechanism::kWipd,
                      Mechanism::kGreedy));

TEST(RunExperimentTest, TierOneBudgetsFeasible) {
  for (Mechanism m : {Mechanism::kTenm, Mechanism::kNtbfm, Mechanism::kPsm}) {
    ExperimentConfig c = Small(m);
    c.deviation_frac = 0.3;
    ExperimentReport r = *RunExperiment(c);
    EXPECT_TRUE(r.BudgetFeasible());
    EXPECT_FALSE(r.HasViolation());
  }
}

TEST(RunExperimentTest, DifferentSeedsDiffer) {
  ExperimentConfig c = Small(Mechanism::kTenm);
  std::string a = ExperimentReportJson(*RunExperiment(c)).dump();
  c.seed = 13;
  std::string b = ExperimentReportJson(*RunExperiment(c)).dump();
  EXPECT_NE(a, b);
}

TEST(RunExperimentTest, ZeroFractionIgnoresDeviationRule) {
  ExperimentConfig c = Small(Mechanism::kNtbfm);
  ExperimentReport a = *RunExperiment(c);
  c.cost_drop = Rational(11);
  ExperimentReport b = *RunExperiment(c);
  ASSERT_EQ(a.rounds.size(), b.rounds.size());
  for (size_t i = 0; i < a.rounds.size(); ++i) {
    EXPECT_EQ(Metric(a.rounds[i], "total_payment")->dump(),
              Metric(b.rounds[i], "total_payment")->dump());
    EXPECT_EQ(Metric(a.rounds[i], "deviators"), nullptr);
  }
}

TEST(RunExperimentTest, BudgetSweepWinnersNonDecreasing) {
  ExperimentConfig c = Small(Mechanism::kTenm);
  c.budgets = {Rational(100), Rational(300), Rational(900), Rational(2700)};
  ExperimentReport r = *RunExperiment(c);
  std::map<int, int64_t> last;
  for (const RoundRecord& rec : r.rounds) {
    int64_t w = Metric(rec, "winners")->get<int64_t>();
    if (last.count(rec.round)) {
      EXPECT_GE(w, last[rec.round]);
    }
    last[rec.round] = w;
  }
  EXPECT_EQ(last.size(), 3u);
  EXPECT_EQ(r.rounds.size(), 12u);
}

TEST(ExperimentMetricRowsTest, SweepRowsCarryBudget) {
  ExperimentConfig c = Small(Mechanism::kPsm);
  c.budgets = {Rational(100), Rational(200)};
  std::vector<MetricRow> rows = ExperimentMetricRows(*RunExperiment(c));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0].metric, "winners@B=100");
}

TEST(ExperimentConfigJsonTest, DigestTracksConfig) {
  ExperimentConfig c = Small(Mechanism::kTenm);
  Json a = ExperimentReportJson(*RunExperiment(c));
  c.rounds = 2;
  Json b = ExperimentReportJson(*RunExperiment(c));
  EXPECT_NE(a["config_digest"], b["config_digest"]);
  EXPECT_EQ(a["schema_version"], kReportSchemaVersion);
}

}  // namespace
}  // namespace crowdmech
