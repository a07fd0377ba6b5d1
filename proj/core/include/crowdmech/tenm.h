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

#ifndef CROWDMECH_TENM_H_
#define CROWDMECH_TENM_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "crowdmech/coverage.h"
#include "crowdmech/graph.h"
#include "crowdmech/rational.h"

namespace crowdmech {

// Reported (or true) notifier cost per node. Nodes without a cost are not
// eligible to be selected, but they still count as notifiable neighbors.
class CostProfile {
 public:
  CostProfile() = default;

  // Every present cost must be > 0.
  static absl::StatusOr<CostProfile> Create(
      std::vector<std::optional<Rational>> costs);
  static CostProfile Uniform(int n, const Rational& cost);

  int size() const { return static_cast<int>(costs_.size()); }
  bool eligible(NodeId node) const { return costs_[node].has_value(); }
  const Rational& cost(NodeId node) const { return *costs_[node]; }

  // Copy with one node's cost replaced (used for deviation probes).
  CostProfile WithCost(NodeId node, const Rational& cost) const;

 private:
  explicit CostProfile(std::vector<std::optional<Rational>> costs)
      : costs_(std::move(costs)) {}
  std::vector<std::optional<Rational>> costs_;
};

// "node_id,cost" rows keyed by original node id; an optional header row is
// skipped. Nodes not listed are ineligible.
absl::StatusOr<CostProfile> ParseCostCsv(std::istream& in,
                                         const SocialGraph& graph);

// Costs embedded in an edge list as comment lines "# cost: <node_id> <cost>",
// which plain edge-list readers ignore. Returns nullopt when there are none.
absl::StatusOr<std::optional<CostProfile>> ParseEmbeddedCosts(
    std::istream& in, const SocialGraph& graph);

class Budget {
 public:
  static absl::StatusOr<Budget> Create(const Rational& value);
  const Rational& value() const { return value_; }

 private:
  explicit Budget(const Rational& value) : value_(value) {}
  Rational value_;
};

// Budget used by the payment rule's greedy rerun and by the per-position
// share rho_{j,k}.
enum class PaymentScale {
  // B, exactly as the pricing algorithm is written. Reproduces the worked
  // example, but payments can exceed a winner's critical bid because the
  // allocation rule itself only spends B / delta.
  kLiteral,
  // B / delta, consistent with the allocation threshold, so every payment is
  // the winner's critical bid.
  kCriticalValue,
};

struct TenmOptions {
  Rational delta{2};
  PaymentScale payment_scale = PaymentScale::kLiteral;
  // Winners' payment reruns are independent; results are merged by position
  // so the worker count never changes the output.
  int workers = 1;
};

struct NotifierSelection {
  // Greedy order.
  std::vector<NodeId> selected;
  // Union of the selected nodes' neighborhoods, ascending.
  std::vector<NodeId> notified;
};

struct NotifierOutcome {
  std::vector<NodeId> selected;
  std::vector<NodeId> notified;
  std::map<NodeId, Rational> payments;
  Rational delta{2};
  double elapsed_ms = 0.0;

  Rational TotalPayment() const;
};

// Greedy by marginal notification per cost; selects i while
// c_i <= (B / delta) * h(i|S) / (h(S) + h(i|S)), stopping at the first
// violation. Ties go to the lowest node id; zero-marginal nodes never win.
absl::StatusOr<NotifierSelection> NamSelect(const CoverageOracle& oracle,
                                            const CostProfile& costs,
                                            const Budget& budget,
                                            const Rational& delta = 2);

// One threshold position of a winner's payment.
struct PaymentPosition {
  int k = 0;  // 1-based
  // The rerun node occupying position k (the first loser at |S'|+1).
  std::optional<NodeId> reference;
  int64_t winner_gain = 0;     // h_{j,k}
  int64_t reference_gain = 0;  // h'_{k|T_{k-1}}
  // Cost at which the winner ties the reference; nullopt means unbounded.
  std::optional<Rational> nabla;
  Rational rho;
  Rational value;  // min(nabla, rho)
};

struct PaymentTrace {
  NodeId winner = 0;
  std::vector<NodeId> rerun_selected;  // S'
  std::optional<NodeId> first_loser;
  std::vector<PaymentPosition> positions;
  Rational payment;
};

// Threshold payments for `selected`. For each winner j the greedy is rerun
// with j removed as a candidate (j stays in the graph as a notifiable node).
absl::StatusOr<std::vector<PaymentTrace>> NpmPriceTraces(
    const CoverageOracle& oracle, const CostProfile& costs,
    const Budget& budget, std::span<const NodeId> selected,
    const TenmOptions& options = {});

absl::StatusOr<std::map<NodeId, Rational>> NpmPrices(
    const CoverageOracle& oracle, const CostProfile& costs,
    const Budget& budget, std::span<const NodeId> selected,
    const TenmOptions& options = {});

absl::StatusOr<NotifierOutcome> TenmRun(const CoverageOracle& oracle,
                                        const CostProfile& costs,
                                        const Budget& budget,
                                        const TenmOptions& options = {});

Rational NotifierUtility(const Rational& true_cost, const Rational& payment,
                         bool selected);

// Non-truthful baseline: one static sort by initial marginal per cost, then
// select while the reported cost fits in the remaining budget; pay-as-bid.
absl::StatusOr<NotifierOutcome> Ntbfm(const CoverageOracle& oracle,
                                      const CostProfile& costs,
                                      const Budget& budget);

// Proportional share: the k cheapest nodes for the largest k with
// c_k <= B / k, each paid min(B / k, c_{k+1}). Ignores the graph except for
// reporting the notified set.
absl::StatusOr<NotifierOutcome> Psm(const CoverageOracle& oracle,
                                    const CostProfile& costs,
                                    const Budget& budget);

// Checks payments are defined exactly on the winners, each covers the
// winner's reported cost, and the total is within budget.
absl::Status ValidateNotifierOutcome(const NotifierOutcome& outcome,
                                     const CostProfile& costs,
                                     const Budget& budget);

}  // namespace crowdmech

#endif  // CROWDMECH_TENM_H_
