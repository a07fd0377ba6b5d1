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

#ifndef CROWDMECH_ECTAI_H_
#define CROWDMECH_ECTAI_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "crowdmech/graph.h"
#include "crowdmech/random.h"

namespace crowdmech {

struct PanelEntry {
  NodeId device = 0;
  double position = 0.0;  // in [0, 1]
};

struct PeakReport {
  NodeId reviewer = 0;
  double alpha = 0.0;  // in [0, 1]
};

// Sorted copy; odd count takes the middle element, even count averages the
// two middle elements.
absl::StatusOr<double> MedianOf(std::span<const double> reports);
absl::StatusOr<double> MeanOf(std::span<const double> reports);

// Panel device nearest to `aggregate`; ties go to the lowest id.
absl::StatusOr<NodeId> SelectQuality(std::span<const PanelEntry> panel,
                                     double aggregate);

double ReviewerRegret(double true_alpha, double aggregate);

// Supplies each reviewer's reported peak for a batch.
class PeakSource {
 public:
  virtual ~PeakSource() = default;
  // `rng` is a stream private to (batch, reviewer); `panel` is the batch's
  // placed devices.
  virtual absl::StatusOr<double> Peak(int batch, NodeId reviewer,
                                      std::span<const PanelEntry> panel,
                                      Rng& rng) const = 0;
};

// Seed of the stream handed to PeakSource::Peak for (batch, reviewer).
uint64_t PeakStreamSeed(uint64_t seed, int batch, NodeId reviewer);

class UniformPeakSource : public PeakSource {
 public:
  absl::StatusOr<double> Peak(int batch, NodeId reviewer,
                              std::span<const PanelEntry> panel,
                              Rng& rng) const override;
};

// Normal draws clamped to [0, 1] (never resampled, so one draw per report).
class NormalPeakSource : public PeakSource {
 public:
  NormalPeakSource(double mu, double sigma) : mu_(mu), sigma_(sigma) {}
  absl::StatusOr<double> Peak(int batch, NodeId reviewer,
                              std::span<const PanelEntry> panel,
                              Rng& rng) const override;

 private:
  double mu_;
  double sigma_;
};

// Replays "batch,reviewer,alpha" rows; batches are 1-based.
class ScriptedPeakSource : public PeakSource {
 public:
  void Set(int batch, NodeId reviewer, double alpha) {
    peaks_[{batch, reviewer}] = alpha;
  }
  absl::StatusOr<double> Peak(int batch, NodeId reviewer,
                              std::span<const PanelEntry> panel,
                              Rng& rng) const override;

 private:
  std::map<std::pair<int, NodeId>, double> peaks_;
};

absl::StatusOr<ScriptedPeakSource> ParsePeakCsv(std::istream& in);

struct BatchPlan {
  std::vector<PanelEntry> panel;   // eta with positions
  std::vector<NodeId> reviewers;
};

// Chooses eta, their positions and the reviewers of one batch.
class BatchPlanner {
 public:
  virtual ~BatchPlanner() = default;
  // `unranked` and `devices` are ascending. `seed` is the run seed.
  virtual absl::StatusOr<BatchPlan> Plan(int batch,
                                         std::span<const NodeId> unranked,
                                         std::span<const NodeId> devices, int f,
                                         int g, uint64_t seed) const = 0;
};

// eta uniformly from the unranked pool, reviewers uniformly from all other
// devices, positions uniform on [0, 1]. Each draw uses its own stream
// indexed by batch number.
class RandomBatchPlanner : public BatchPlanner {
 public:
  absl::StatusOr<BatchPlan> Plan(int batch, std::span<const NodeId> unranked,
                                 std::span<const NodeId> devices, int f, int g,
                                 uint64_t seed) const override;
};

// Fixed plans per 1-based batch number.
class ScriptedBatchPlanner : public BatchPlanner {
 public:
  void Set(int batch, BatchPlan plan) { plans_[batch] = std::move(plan); }
  absl::StatusOr<BatchPlan> Plan(int batch, std::span<const NodeId> unranked,
                                 std::span<const NodeId> devices, int f, int g,
                                 uint64_t seed) const override;

 private:
  std::map<int, BatchPlan> plans_;
};

// "batch,role,device,position" rows with role panel|reviewer; position is
// ignored for reviewers.
absl::StatusOr<ScriptedBatchPlanner> ParsePlanCsv(std::istream& in);

enum class Aggregator { kMedian, kMean };

struct BatchRecord {
  int batch = 0;  // 1-based
  std::vector<PanelEntry> panel;
  std::vector<PeakReport> reports;
  double aggregate = 0.0;
  NodeId winner = 0;
};

struct QualityRanking {
  std::vector<NodeId> ordered;  // one winner per batch, in batch order
  std::vector<BatchRecord> batches;
};

struct RankingOptions {
  int f = 3;
  int g = 5;
  uint64_t seed = 0;
  Aggregator aggregator = Aggregator::kMedian;
  // Report collection within a batch; results never depend on it.
  int workers = 1;
};

absl::StatusOr<QualityRanking> RunQualityRanking(
    std::span<const NodeId> devices, const PeakSource& peaks,
    const BatchPlanner& planner, const RankingOptions& options);

// Median aggregate.
absl::StatusOr<QualityRanking> EctaiRun(std::span<const NodeId> devices,
                                        const PeakSource& peaks,
                                        const BatchPlanner& planner,
                                        RankingOptions options);

// Mean aggregate.
absl::StatusOr<QualityRanking> AvrRun(std::span<const NodeId> devices,
                                      const PeakSource& peaks,
                                      const BatchPlanner& planner,
                                      RankingOptions options);

// Partition, winner-in-panel and aggregate-bounds checks.
absl::Status ValidateRanking(const QualityRanking& ranking,
                             std::span<const NodeId> devices);

}  // namespace crowdmech

#endif  // CROWDMECH_ECTAI_H_
