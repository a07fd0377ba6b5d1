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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <set>
#include <string>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace crowdmech {
namespace {

// Stream coordinates for MixSeed(seed, batch, kind, reviewer).
enum StreamKind : uint64_t {
  kPanelDraw = 1,
  kReviewerDraw = 2,
  kPositionDraw = 3,
  kPeakDraw = 4,
};

bool InUnit(double x) { return x >= 0.0 && x <= 1.0; }

absl::Status LineError(int line_no, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line_no, ": ", what));
}

// Splits non-comment CSV lines; skips a header whose first field is not a
// number.
template <typename Fn>
absl::Status ForEachCsvRow(std::istream& in, size_t fields, Fn fn) {
  std::string line;
  int line_no = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text[0] == '#') continue;
    ++rows;
    std::vector<std::string> parts = absl::StrSplit(text, ',');
    for (std::string& p : parts) p = std::string(absl::StripAsciiWhitespace(p));
    int64_t probe;
    if (rows == 1 && !parts.empty() && !absl::SimpleAtoi(parts[0], &probe)) {
      continue;
    }
    if (parts.size() < fields) {
      return LineError(line_no, absl::StrCat("expected ", fields, " fields"));
    }
    if (absl::Status s = fn(line_no, parts); !s.ok()) return s;
  }
  return absl::OkStatus();
}

}  // namespace

uint64_t PeakStreamSeed(uint64_t seed, int batch, NodeId reviewer) {
  return MixSeed(seed, static_cast<uint64_t>(batch), kPeakDraw,
                 static_cast<uint64_t>(reviewer));
}

absl::StatusOr<double> MedianOf(std::span<const double> reports) {
  if (reports.empty()) {
    return absl::InvalidArgumentError("median of an empty report list");
  }
  std::vector<double> sorted(reports.begin(), reports.end());
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

absl::StatusOr<double> MeanOf(std::span<const double> reports) {
  if (reports.empty()) {
    return absl::InvalidArgumentError("mean of an empty report list");
  }
  double sum = 0.0;
  for (double r : reports) sum += r;
  return sum / static_cast<double>(reports.size());
}

absl::StatusOr<NodeId> SelectQuality(std::span<const PanelEntry> panel,
                                     double aggregate) {
  if (panel.empty()) return absl::InvalidArgumentError("empty panel");
  const PanelEntry* best = nullptr;
  double best_dist = 0.0;
  for (const PanelEntry& e : panel) {
    double d = std::abs(e.position - aggregate);
    if (best == nullptr || d < best_dist ||
        (d == best_dist && e.device < best->device)) {
      best = &e;
      best_dist = d;
    }
  }
  return best->device;
}

double ReviewerRegret(double true_alpha, double aggregate) {
  return std::abs(true_alpha - aggregate);
}

absl::StatusOr<double> UniformPeakSource::Peak(int, NodeId,
                                                std::span<const PanelEntry>,
                                                Rng& rng) const {
  return rng.Uniform01();
}

absl::StatusOr<double> NormalPeakSource::Peak(int, NodeId,
                                               std::span<const PanelEntry>,
                                               Rng& rng) const {
  return std::clamp(rng.Normal(mu_, sigma_), 0.0, 1.0);
}

absl::StatusOr<double> ScriptedPeakSource::Peak(int batch, NodeId reviewer,
                                                std::span<const PanelEntry>,
                                                Rng&) const {
  auto it = peaks_.find({batch, reviewer});
  if (it == peaks_.end()) {
    return absl::NotFoundError(absl::StrCat("no scripted peak for batch ",
                                            batch, " reviewer ", reviewer));
  }
  return it->second;
}

absl::StatusOr<ScriptedPeakSource> ParsePeakCsv(std::istream& in) {
  ScriptedPeakSource source;
  absl::Status s = ForEachCsvRow(
      in, 3, [&](int line_no, const std::vector<std::string>& f) {
        int batch;
        int64_t reviewer;
        double alpha;
        if (!absl::SimpleAtoi(f[0], &batch) ||
            !absl::SimpleAtoi(f[1], &reviewer) ||
            !absl::SimpleAtod(f[2], &alpha)) {
          return LineError(line_no, "expected batch,reviewer,alpha");
        }
        if (!InUnit(alpha)) return LineError(line_no, "alpha outside [0,1]");
        source.Set(batch, static_cast<NodeId>(reviewer), alpha);
        return absl::OkStatus();
      });
  if (!s.ok()) return s;
  return source;
}

absl::StatusOr<BatchPlan> RandomBatchPlanner::Plan(
    int batch, std::span<const NodeId> unranked,
    std::span<const NodeId> devices, int f, int g, uint64_t seed) const {
  BatchPlan plan;
  Rng panel_rng(MixSeed(seed, batch, kPanelDraw));
  std::vector<NodeId> eta = panel_rng.Sample(unranked, f);
  std::sort(eta.begin(), eta.end());
  std::vector<NodeId> pool;
  pool.reserve(devices.size());
  std::set_difference(devices.begin(), devices.end(), eta.begin(), eta.end(),
                      std::back_inserter(pool));
  if (static_cast<int>(pool.size()) < g) {
    return absl::FailedPreconditionError(
        absl::StrCat("batch ", batch, " has ", pool.size(),
                     " eligible reviewers, need ", g));
  }
  Rng reviewer_rng(MixSeed(seed, batch, kReviewerDraw));
  plan.reviewers = reviewer_rng.Sample(std::span<const NodeId>(pool), g);
  std::sort(plan.reviewers.begin(), plan.reviewers.end());
  Rng position_rng(MixSeed(seed, batch, kPositionDraw));
  for (NodeId d : eta) plan.panel.push_back({d, position_rng.Uniform01()});
  return plan;
}

absl::StatusOr<BatchPlan> ScriptedBatchPlanner::Plan(
    int batch, std::span<const NodeId>, std::span<const NodeId>, int, int,
    uint64_t) const {
  auto it = plans_.find(batch);
  if (it == plans_.end()) {
    return absl::NotFoundError(absl::StrCat("no scripted plan for batch ",
                                            batch));
  }
  return it->second;
}

absl::StatusOr<ScriptedBatchPlanner> ParsePlanCsv(std::istream& in) {
  ScriptedBatchPlanner planner;
  std::map<int, BatchPlan> plans;
  absl::Status s = ForEachCsvRow(
      in, 3, [&](int line_no, const std::vector<std::string>& f) {
        int batch;
        int64_t device;
        if (!absl::SimpleAtoi(f[0], &batch) ||
            !absl::SimpleAtoi(f[2], &device)) {
          return LineError(line_no, "expected batch,role,device[,position]");
        }
        if (f[1] == "reviewer") {
          plans[batch].reviewers.push_back(static_cast<NodeId>(device));
        } else if (f[1] == "panel") {
          double pos;
          if (f.size() < 4 || !absl::SimpleAtod(f[3], &pos) || !InUnit(pos)) {
            return LineError(line_no, "panel rows need a position in [0,1]");
          }
          plans[batch].panel.push_back({static_cast<NodeId>(device), pos});
        } else {
          return LineError(line_no, "role must be panel or reviewer");
        }
        return absl::OkStatus();
      });
  if (!s.ok()) return s;
  for (auto& [batch, plan] : plans) planner.Set(batch, std::move(plan));
  return planner;
}

absl::StatusOr<QualityRanking> RunQualityRanking(
    std::span<const NodeId> devices, const PeakSource& peaks,
    const BatchPlanner& planner, const RankingOptions& options) {
  if (options.f < 1 || options.g < 1) {
    return absl::InvalidArgumentError("f and g must be >= 1");
  }
  std::vector<NodeId> all(devices.begin(), devices.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    return absl::InvalidArgumentError("duplicate device id");
  }
  if (static_cast<size_t>(options.f) + options.g > all.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("f + g = ", options.f + options.g, " exceeds ",
                     all.size(), " devices"));
  }
  std::set<NodeId> unranked(all.begin(), all.end());
  QualityRanking ranking;
  for (int batch = 1; !unranked.empty(); ++batch) {
    std::vector<NodeId> pool(unranked.begin(), unranked.end());
    absl::StatusOr<BatchPlan> plan =
        planner.Plan(batch, pool, all, options.f, options.g, options.seed);
    if (!plan.ok()) return plan.status();
    if (plan->panel.empty() || plan->reviewers.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("batch ", batch, " has an empty panel or no reviewers"));
    }
    std::set<NodeId> eta;
    for (const PanelEntry& e : plan->panel) {
      if (!unranked.contains(e.device) || !eta.insert(e.device).second) {
        return absl::InvalidArgumentError(absl::StrCat(
            "batch ", batch, ": device ", e.device, " is not unranked"));
      }
      if (!InUnit(e.position)) {
        return absl::InvalidArgumentError("panel position outside [0,1]");
      }
    }
    for (NodeId r : plan->reviewers) {
      if (eta.contains(r) || !std::binary_search(all.begin(), all.end(), r)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "batch ", batch, ": reviewer ", r, " is not eligible"));
      }
    }

    BatchRecord record;
    record.batch = batch;
    record.panel = plan->panel;
    const size_t g = plan->reviewers.size();
    std::vector<absl::StatusOr<double>> alphas(g, 0.0);
    auto collect = [&](size_t i) {
      NodeId r = plan->reviewers[i];
      Rng rng(PeakStreamSeed(options.seed, batch, r));
      alphas[i] = peaks.Peak(batch, r, record.panel, rng);
    };
    int workers = std::clamp<int>(options.workers, 1, static_cast<int>(g));
    if (workers == 1) {
      for (size_t i = 0; i < g; ++i) collect(i);
    } else {
      std::atomic<size_t> next{0};
      std::vector<std::thread> pool_threads;
      for (int w = 0; w < workers; ++w) {
        pool_threads.emplace_back([&] {
          for (size_t i = next++; i < g; i = next++) collect(i);
        });
      }
      for (std::thread& t : pool_threads) t.join();
    }
    std::vector<double> values;
    for (size_t i = 0; i < g; ++i) {
      if (!alphas[i].ok()) return alphas[i].status();
      if (!InUnit(*alphas[i])) {
        return absl::InvalidArgumentError("peak report outside [0,1]");
      }
      record.reports.push_back({plan->reviewers[i], *alphas[i]});
      values.push_back(*alphas[i]);
    }
    absl::StatusOr<double> agg = options.aggregator == Aggregator::kMedian
                                     ? MedianOf(values)
                                     : MeanOf(values);
    if (!agg.ok()) return agg.status();
    record.aggregate = *agg;
    absl::StatusOr<NodeId> winner = SelectQuality(record.panel, *agg);
    if (!winner.ok()) return winner.status();
    record.winner = *winner;
    for (NodeId d : eta) unranked.erase(d);
    ranking.ordered.push_back(record.winner);
    ranking.batches.push_back(std::move(record));
  }
  return ranking;
}

absl::StatusOr<QualityRanking> EctaiRun(std::span<const NodeId> devices,
                                        const PeakSource& peaks,
                                        const BatchPlanner& planner,
                                        RankingOptions options) {
  options.aggregator = Aggregator::kMedian;
  return RunQualityRanking(devices, peaks, planner, options);
}

absl::StatusOr<QualityRanking> AvrRun(std::span<const NodeId> devices,
                                      const PeakSource& peaks,
                                      const BatchPlanner& planner,
                                      RankingOptions options) {
  options.aggregator = Aggregator::kMean;
  return RunQualityRanking(devices, peaks, planner, options);
}

absl::Status ValidateRanking(const QualityRanking& ranking,
                             std::span<const NodeId> devices) {
  std::multiset<NodeId> seen;
  if (ranking.ordered.size() != ranking.batches.size()) {
    return absl::InternalError("one winner per batch expected");
  }
  for (size_t b = 0; b < ranking.batches.size(); ++b) {
    const BatchRecord& rec = ranking.batches[b];
    bool in_panel = false;
    for (const PanelEntry& e : rec.panel) {
      seen.insert(e.device);
      in_panel |= e.device == rec.winner;
    }
    if (!in_panel || ranking.ordered[b] != rec.winner) {
      return absl::InternalError(
          absl::StrCat("batch ", rec.batch, " winner is not in its panel"));
    }
    double lo = 1.0, hi = 0.0;
    for (const PeakReport& r : rec.reports) {
      lo = std::min(lo, r.alpha);
      hi = std::max(hi, r.alpha);
    }
    if (rec.aggregate < lo - 1e-12 || rec.aggregate > hi + 1e-12) {
      return absl::InternalError(
          absl::StrCat("batch ", rec.batch, " aggregate outside report range"));
    }
  }
  std::multiset<NodeId> expected(devices.begin(), devices.end());
  if (seen != expected) {
    return absl::InternalError("batches do not partition the devices");
  }
  return absl::OkStatus();
}

}  // namespace crowdmech
