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

#ifndef CROWDMECH_WIPD_H_
#define CROWDMECH_WIPD_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "crowdmech/rational.h"

namespace crowdmech {

// Bitmask over task ids 0..m-1.
using TaskSet = uint64_t;

inline constexpr int kMaxDemandTasks = 20;
inline constexpr int kMaxGsTasks = 6;

inline bool HasTask(TaskSet s, int task) { return (s >> task) & 1U; }
inline int TaskCount(TaskSet s) { return __builtin_popcountll(s); }
inline TaskSet AllTasks(int m) {
  return m >= 64 ? ~TaskSet{0} : (TaskSet{1} << m) - 1;
}
std::vector<int> TaskList(TaskSet s);
TaskSet TaskSetOf(std::span<const int> tasks);
// "{t1,t3}" with 1-based task labels.
std::string FormatTaskSet(TaskSet s);
// True when a precedes b: smaller size first, then the lexicographically
// smaller sorted task list.
bool TaskSetBefore(TaskSet a, TaskSet b);

// A device's valuation (its cost of executing a bundle), tabulated over all
// 2^m bundles.
class Valuation {
 public:
  static absl::StatusOr<Valuation> Additive(std::span<const Rational> values);
  // Unlisted bundles take the largest value of a listed sub-bundle; v(empty)
  // is 0. Listed values must already be monotone.
  static absl::StatusOr<Valuation> FromListed(
      int m, const std::vector<std::pair<TaskSet, Rational>>& listed);
  static Valuation Zero(int m);

  int num_tasks() const { return m_; }
  const Rational& operator()(TaskSet s) const { return table_[s]; }
  Valuation Scaled(const Rational& factor) const;
  bool IsAdditive() const;

 private:
  Valuation(int m, std::vector<Rational> table)
      : m_(m), table_(std::move(table)) {}
  int m_ = 0;
  std::vector<Rational> table_;
};

struct ValuationSet {
  int num_tasks = 0;
  std::vector<int> device_ids;  // display ids, ascending
  std::vector<Valuation> valuations;
};

// {"tasks": m, "devices": {"<id>": [{"subset": [task, ...], "value": v}]}}
// or {"tasks": m, "devices": {"<id>": {"additive": [v0, v1, ...]}}}.
// Task ids are 1-based. Values are numbers or rational strings such as "7/2".
absl::StatusOr<ValuationSet> ParseValuationJson(std::istream& in);

enum class DemandPolicy {
  // argmax of the executor's utility change: payment received minus cost.
  kNetGain,
  // argmin of payment minus cost, as the demand rule is written.
  kLiteral,
};

absl::StatusOr<DemandPolicy> ParseDemandPolicy(absl::string_view name);
absl::string_view DemandPolicyName(DemandPolicy policy);

// Exhaustive over F in (all tasks \ holdings). Ties go to the smaller |F|,
// then the lexicographically smaller F, so the empty set wins any tie.
absl::StatusOr<TaskSet> BruteForceDemand(const Valuation& v, TaskSet holdings,
                                         std::span<const Rational> prices,
                                         const Rational& epsilon,
                                         DemandPolicy policy);

class DemandOracle {
 public:
  virtual ~DemandOracle() = default;
  // `pass` is 1-based; `device` is the internal index.
  virtual absl::StatusOr<TaskSet> Demand(int pass, int device,
                                         TaskSet holdings,
                                         std::span<const Rational> prices,
                                         const Rational& epsilon) const = 0;
};

class ValuationDemandOracle : public DemandOracle {
 public:
  ValuationDemandOracle(std::vector<Valuation> valuations, DemandPolicy policy)
      : valuations_(std::move(valuations)), policy_(policy) {}
  absl::StatusOr<TaskSet> Demand(int pass, int device, TaskSet holdings,
                                 std::span<const Rational> prices,
                                 const Rational& epsilon) const override;

 private:
  std::vector<Valuation> valuations_;
  DemandPolicy policy_;
};

// Replays (pass, device, F); anything off-script demands the empty set.
class ScriptedDemandOracle : public DemandOracle {
 public:
  void Set(int pass, int device, TaskSet demand) {
    script_[{pass, device}] = demand;
  }
  absl::StatusOr<TaskSet> Demand(int pass, int device, TaskSet holdings,
                                 std::span<const Rational> prices,
                                 const Rational& epsilon) const override;

 private:
  std::map<std::pair<int, int>, TaskSet> script_;
};

// "pass,device,tasks" rows; tasks are 1-based labels separated by spaces
// or semicolons, empty for the empty set. Device is a 0-based index.
absl::StatusOr<ScriptedDemandOracle> ParseDemandScriptCsv(std::istream& in);

struct TraceRow {
  int pass = 0;
  int device = 0;
  TaskSet demanded = 0;
  std::vector<Rational> prices_after;
};

struct AuctionOutcome {
  std::vector<TaskSet> allocation;  // per device
  std::vector<Rational> payments;   // per device
  std::vector<Rational> prices;     // final per-task prices
  int rounds = 0;                   // passes, including the final quiet one
  std::vector<TraceRow> trace;
};

struct AuctionOptions {
  Rational epsilon{1};
  // <= 0 selects DefaultMaxRounds.
  int max_rounds = 0;
};

// ceil(max_valuation * m / epsilon) + m.
int DefaultMaxRounds(std::span<const Valuation> valuations,
                     const Rational& epsilon);

// Payload key under which a failed run attaches its trace CSV.
inline constexpr char kTracePayloadUrl[] = "crowdmech/wipd-trace";

// Ascending-price dynamics: passes over devices in index order until a
// whole pass demands nothing. Exceeding max_rounds returns
// ResourceExhausted with the trace attached as a payload.
absl::StatusOr<AuctionOutcome> WipdRun(int num_tasks, int num_devices,
                                       const DemandOracle& oracle,
                                       const AuctionOptions& options);

// Valuation-driven run; max_rounds defaults from the valuations.
absl::StatusOr<AuctionOutcome> WipdRun(std::span<const Valuation> valuations,
                                       DemandPolicy policy,
                                       AuctionOptions options);

Rational DeviceUtility(const Rational& payment, const Rational& value,
                       bool allocated);

// Columns: round,device,demanded,prices_after.
void WriteTraceCsv(const AuctionOutcome& outcome, std::ostream& out);

// Disjointness after every turn, price steps of exactly epsilon per demand,
// prices on the epsilon lattice, and payment identity at the end.
absl::Status ValidateAuctionOutcome(const AuctionOutcome& outcome,
                                    int num_tasks, const Rational& epsilon);

struct StabilityViolation {
  int device = 0;
  TaskSet alternative = 0;
  Rational improvement;
  Rational allowance;
};

// At final prices, no bundle improves a device's utility (payment minus
// cost) by more than (m + |bundle|) * epsilon.
std::optional<StabilityViolation> CheckEpsilonStability(
    const AuctionOutcome& outcome, std::span<const Valuation> valuations,
    const Rational& epsilon);

struct GsWitness {
  std::vector<int64_t> low_prices;
  std::vector<int64_t> high_prices;
  TaskSet demanded_at_low = 0;
};

struct GsResult {
  bool gross_substitutes = true;
  std::optional<GsWitness> witness;
};

// Exhaustive gross-substitutes check over integer prices {0..grid_max}^m.
// Demand is the set of bundles minimizing price minus value.
absl::StatusOr<GsResult> GsCheck(const Valuation& v, int grid_max);

struct BundleBid {
  int device = 0;
  TaskSet bundle = 0;
  Rational bid;
};

// Ascending bid / sqrt(|bundle|) (ties to the lower device), accept when
// disjoint from accepted bundles, pay-as-bid.
absl::StatusOr<AuctionOutcome> GreedyBaseline(std::span<const BundleBid> bids,
                                              int num_tasks, int num_devices);

}  // namespace crowdmech

#endif  // CROWDMECH_WIPD_H_
