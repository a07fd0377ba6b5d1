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

#include "crowdmech/ectai.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace crowdmech {
namespace {

using ::testing::ElementsAre;

std::vector<NodeId> Devices(int n) {
  std::vector<NodeId> d(n);
  std::iota(d.begin(), d.end(), 1);
  return d;
}

TEST(MedianOfTest, OddAndEven) {
  std::vector<double> odd = {0.7, 0.1, 0.5};
  EXPECT_DOUBLE_EQ(*MedianOf(odd), 0.5);
  std::vector<double> even = {0.4, 0.1, 0.2, 0.9};
  EXPECT_DOUBLE_EQ(*MedianOf(even), 0.3);
  EXPECT_FALSE(MedianOf(std::vector<double>{}).ok());
}

TEST(MedianOfTest, MedianResistsOutlierMeanDoesNot) {
  std::vector<double> r = {0, 0, 1};
  EXPECT_DOUBLE_EQ(*MedianOf(r), 0.0);
  EXPECT_DOUBLE_EQ(*MeanOf(r), 1.0 / 3);
}

TEST(SelectQualityTest, NearestWithLowestIdTies) {
  std::vector<PanelEntry> panel = {{4, 0.52}, {2, 0.30}, {9, 0.80}};
  EXPECT_EQ(*SelectQuality(panel, 0.50), 4);
  EXPECT_EQ(*SelectQuality(panel, 0.95), 9);
  std::vector<PanelEntry> tie = {{7, 0.25}, {3, 0.75}};
  EXPECT_EQ(*SelectQuality(tie, 0.5), 3);
  EXPECT_FALSE(SelectQuality(std::vector<PanelEntry>{}, 0.5).ok());
}

TEST(ReviewerRegretTest, AbsoluteDistance) {
  EXPECT_DOUBLE_EQ(ReviewerRegret(0.3, 0.5), 0.2);
  EXPECT_DOUBLE_EQ(ReviewerRegret(0.5, 0.3), 0.2);
}

TEST(EctaiRunTest, ScriptedReplay) {
  std::ifstream plan_in(testing::FixturePath("example2_plan.csv"));
  std::ifstream peak_in(testing::FixturePath("example2_peaks.csv"));
  ScriptedBatchPlanner plan = *ParsePlanCsv(plan_in);
  ScriptedPeakSource peaks = *ParsePeakCsv(peak_in);
  std::vector<NodeId> devices = Devices(12);
  absl::StatusOr<QualityRanking> r = EctaiRun(devices, peaks, plan, {});
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_THAT(r->ordered, ElementsAre(4, 3, 10, 8));
  ASSERT_EQ(r->batches.size(), 4u);
  std::vector<double> medians;
  for (const BatchRecord& b : r->batches) medians.push_back(b.aggregate);
  EXPECT_THAT(medians, ElementsAre(::testing::DoubleEq(0.50),
                                   ::testing::DoubleEq(0.50),
                                   ::testing::DoubleEq(0.45),
                                   ::testing::DoubleEq(0.35)));
}

TEST(EctaiRunTest, PartitionsDevicesAndValidates) {
  std::vector<NodeId> devices = Devices(40);
  UniformPeakSource peaks;
  RandomBatchPlanner planner;
  RankingOptions opts;
  opts.seed = 17;
  QualityRanking r = *EctaiRun(devices, peaks, planner, opts);
  EXPECT_TRUE(ValidateRanking(r, devices).ok());
  // Every batch ranks one device; the final short batch may run with fewer
  // than f panel devices.
  for (const BatchRecord& b : r.batches) {
    EXPECT_LE(b.panel.size(), 3u);
    EXPECT_EQ(b.reports.size(), 5u);
    for (const PeakReport& rep : b.reports) {
      for (const PanelEntry& e : b.panel) EXPECT_NE(rep.reviewer, e.device);
    }
  }
}

TEST(EctaiRunTest, DeterministicAcrossWorkers) {
  std::vector<NodeId> devices = Devices(60);
  NormalPeakSource peaks(0.6, 0.3);
  RandomBatchPlanner planner;
  RankingOptions a, b;
  a.seed = b.seed = 99;
  b.workers = 8;
  QualityRanking ra = *EctaiRun(devices, peaks, planner, a);
  QualityRanking rb = *EctaiRun(devices, peaks, planner, b);
  EXPECT_EQ(ra.ordered, rb.ordered);
  ASSERT_EQ(ra.batches.size(), rb.batches.size());
  for (size_t i = 0; i < ra.batches.size(); ++i) {
    EXPECT_EQ(ra.batches[i].aggregate, rb.batches[i].aggregate);
  }
}

TEST(AvrRunTest, MatchesMeanAndNearestOracle) {
  std::vector<NodeId> devices = Devices(400);
  UniformPeakSource peaks;
  RandomBatchPlanner planner;
  RankingOptions opts;
  opts.seed = 5;
  QualityRanking r = *AvrRun(devices, peaks, planner, opts);
  ASSERT_GE(r.batches.size(), 100u);
  for (const BatchRecord& b : r.batches) {
    double sum = 0;
    for (const PeakReport& p : b.reports) sum += p.alpha;
    double mean = sum / b.reports.size();
    EXPECT_NEAR(b.aggregate, mean, 1e-12);
    NodeId best = b.panel[0].device;
    double best_d = std::abs(b.panel[0].position - mean);
    for (const PanelEntry& e : b.panel) {
      double d = std::abs(e.position - mean);
      if (d < best_d || (d == best_d && e.device < best)) {
        best = e.device;
        best_d = d;
      }
    }
    EXPECT_EQ(b.winner, best);
  }
  EXPECT_TRUE(ValidateRanking(r, devices).ok());
}

TEST(EctaiRunTest, RejectsInfeasiblePanelSizes) {
  std::vector<NodeId> devices = Devices(6);
  UniformPeakSource peaks;
  RandomBatchPlanner planner;
  RankingOptions opts;
  opts.f = 3;
  opts.g = 5;
  EXPECT_FALSE(EctaiRun(devices, peaks, planner, opts).ok());
  opts.f = 0;
  EXPECT_FALSE(EctaiRun(Devices(20), peaks, planner, opts).ok());
}

TEST(ParsePeakCsvTest, RejectsOutOfRangeAlpha) {
  std::istringstream in("1,2,1.5\n");
  EXPECT_FALSE(ParsePeakCsv(in).ok());
}

TEST(ValidateRankingTest, DetectsMissingDevice) {
  std::vector<NodeId> devices = Devices(20);
  UniformPeakSource peaks;
  RandomBatchPlanner planner;
  QualityRanking r = *EctaiRun(devices, peaks, planner, {});
  r.ordered.pop_back();
  EXPECT_FALSE(ValidateRanking(r, devices).ok());
}

}  // namespace
}  // namespace crowdmech
