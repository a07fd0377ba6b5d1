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

#include "crowdmech/tenm.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <istream>
#include <queue>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/string_view.h"

namespace crowdmech {
namespace {

struct HeapEntry {
  Rational ratio;
  NodeId node;
  int64_t gain;
  // Number of selections when `gain` was computed.
  int stamp;
};

// Max-heap on ratio, lowest id first among equal ratios.
struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    return a.node > b.node;
  }
};

struct GreedyResult {
  std::vector<NodeId> selected;
  std::optional<NodeId> first_loser;
};

bool Admits(const Rational& cost, const Rational& scale, int64_t gain,
            int64_t covered) {
  return cost <= scale * Rational(gain, covered + gain);
}

// Threshold greedy over eligible nodes other than `excluded`. Coverage is
// submodular, so a stale heap ratio is an upper bound and the lazy
// re-evaluation returns the same argmax (and tie-break) as a full scan.
GreedyResult ThresholdGreedy(const CoverageOracle& oracle,
                             const CostProfile& costs, const Rational& scale,
                             std::optional<NodeId> excluded) {
  const SocialGraph& graph = oracle.graph();
  CoveredSet covered = oracle.NewSession();
  std::vector<HeapEntry> entries;
  entries.reserve(graph.num_nodes());
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    if (!costs.eligible(i) || excluded == i) continue;
    int64_t gain = graph.Degree(i);
    entries.push_back({Rational(gain) / costs.cost(i), i, gain, 0});
  }
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> heap(
      HeapLess{}, std::move(entries));

  GreedyResult result;
  int round = 0;
  while (!heap.empty()) {
    HeapEntry top = heap.top();
    heap.pop();
    if (top.stamp != round) {
      top.gain = covered.Gain(top.node);
      top.ratio = Rational(top.gain) / costs.cost(top.node);
      top.stamp = round;
      if (!heap.empty() && HeapLess{}(top, heap.top())) {
        heap.push(std::move(top));
        continue;
      }
    }
    if (top.gain == 0 ||
        !Admits(costs.cost(top.node), scale, top.gain, covered.size())) {
      result.first_loser = top.node;
      break;
    }
    covered.Add(top.node);
    result.selected.push_back(top.node);
    ++round;
  }
  return result;
}

absl::Status CheckSizes(const CoverageOracle& oracle,
                        const CostProfile& costs) {
  if (costs.size() != oracle.graph().num_nodes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cost profile has ", costs.size(), " entries but graph has ",
                     oracle.graph().num_nodes(), " nodes"));
  }
  return absl::OkStatus();
}

absl::Status CheckDelta(const Rational& delta) {
  if (delta <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be > 0, got ", FormatRational(delta)));
  }
  return absl::OkStatus();
}

std::vector<NodeId> NotifiedBy(const CoverageOracle& oracle,
                               std::span<const NodeId> selected) {
  CoveredSet covered = oracle.NewSession();
  for (NodeId i : selected) covered.Add(i);
  return covered.Members();
}

PaymentTrace PriceWinner(const CoverageOracle& oracle,
                         const CostProfile& costs, const Rational& scale,
                         NodeId winner) {
  PaymentTrace trace;
  trace.winner = winner;
  GreedyResult rerun = ThresholdGreedy(oracle, costs, scale, winner);
  trace.rerun_selected = rerun.selected;
  trace.first_loser = rerun.first_loser;

  CoveredSet covered = oracle.NewSession();
  const int positions = static_cast<int>(rerun.selected.size()) + 1;
  Rational best(0);
  for (int k = 1; k <= positions; ++k) {
    PaymentPosition pos;
    pos.k = k;
    pos.reference = k <= static_cast<int>(rerun.selected.size())
                        ? std::optional<NodeId>(rerun.selected[k - 1])
                        : rerun.first_loser;
    pos.winner_gain = covered.Gain(winner);
    if (pos.reference) pos.reference_gain = covered.Gain(*pos.reference);
    if (pos.winner_gain == 0) {
      pos.nabla = Rational(0);
      pos.rho = Rational(0);
      pos.value = Rational(0);
    } else {
      if (pos.reference && pos.reference_gain > 0) {
        pos.nabla = Rational(pos.winner_gain) * costs.cost(*pos.reference) /
                    Rational(pos.reference_gain);
      }
      pos.rho =
          scale * Rational(pos.winner_gain, covered.size() + pos.winner_gain);
      pos.value = pos.nabla ? std::min(*pos.nabla, pos.rho) : pos.rho;
    }
    best = std::max(best, pos.value);
    trace.positions.push_back(pos);
    if (k <= static_cast<int>(rerun.selected.size())) {
      covered.Add(rerun.selected[k - 1]);
    }
  }
  trace.payment = best;
  return trace;
}

}  // namespace

absl::StatusOr<CostProfile> CostProfile::Create(
    std::vector<std::optional<Rational>> costs) {
  for (size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] && *costs[i] <= 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "cost of node ", i, " must be > 0, got ", FormatRational(*costs[i])));
    }
  }
  return CostProfile(std::move(costs));
}

CostProfile CostProfile::Uniform(int n, const Rational& cost) {
  return CostProfile(std::vector<std::optional<Rational>>(n, cost));
}

CostProfile CostProfile::WithCost(NodeId node, const Rational& cost) const {
  CostProfile copy = *this;
  copy.costs_[node] = cost;
  return copy;
}

absl::StatusOr<CostProfile> ParseCostCsv(std::istream& in,
                                         const SocialGraph& graph) {
  std::vector<std::optional<Rational>> costs(graph.num_nodes());
  std::string line;
  int line_no = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text[0] == '#') continue;
    ++rows;
    std::vector<absl::string_view> fields = absl::StrSplit(text, ',');
    if (fields.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost csv line ", line_no, ": expected node_id,cost"));
    }
    int64_t original = 0;
    if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(fields[0]), &original)) {
      if (rows == 1) continue;  // header
      return absl::InvalidArgumentError(
          absl::StrCat("cost csv line ", line_no, ": bad node id"));
    }
    std::optional<NodeId> node = graph.DenseId(original);
    if (!node) {
      return absl::InvalidArgumentError(absl::StrCat(
          "cost csv line ", line_no, ": node ", original, " not in graph"));
    }
    absl::StatusOr<Rational> cost =
        ParseRational(absl::StripAsciiWhitespace(fields[1]));
    if (!cost.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "cost csv line ", line_no, ": ", cost.status().message()));
    }
    costs[*node] = *cost;
  }
  return CostProfile::Create(std::move(costs));
}

absl::StatusOr<std::optional<CostProfile>> ParseEmbeddedCosts(
    std::istream& in, const SocialGraph& graph) {
  constexpr absl::string_view kPrefix = "cost:";
  std::ostringstream rows;
  bool any = false;
  std::string line;
  while (std::getline(in, line)) {
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (!absl::ConsumePrefix(&text, "#")) continue;
    text = absl::StripLeadingAsciiWhitespace(text);
    if (!absl::ConsumePrefix(&text, kPrefix)) continue;
    std::vector<absl::string_view> f =
        absl::StrSplit(text, absl::ByAnyChar(" \t"), absl::SkipEmpty());
    if (f.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad embedded cost line \"", line, "\""));
    }
    rows << f[0] << ',' << f[1] << '\n';
    any = true;
  }
  if (!any) return std::optional<CostProfile>();
  std::istringstream csv(rows.str());
  absl::StatusOr<CostProfile> costs = ParseCostCsv(csv, graph);
  if (!costs.ok()) return costs.status();
  return std::optional<CostProfile>(*std::move(costs));
}

absl::StatusOr<Budget> Budget::Create(const Rational& value) {
  if (value <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget must be > 0, got ", FormatRational(value)));
  }
  return Budget(value);
}

Rational NotifierOutcome::TotalPayment() const {
  Rational total(0);
  for (const auto& [node, pay] : payments) total += pay;
  return total;
}

absl::StatusOr<NotifierSelection> NamSelect(const CoverageOracle& oracle,
                                            const CostProfile& costs,
                                            const Budget& budget,
                                            const Rational& delta) {
  if (absl::Status s = CheckSizes(oracle, costs); !s.ok()) return s;
  if (absl::Status s = CheckDelta(delta); !s.ok()) return s;
  NotifierSelection out;
  out.selected =
      ThresholdGreedy(oracle, costs, budget.value() / delta, std::nullopt)
          .selected;
  out.notified = NotifiedBy(oracle, out.selected);
  return out;
}

absl::StatusOr<std::vector<PaymentTrace>> NpmPriceTraces(
    const CoverageOracle& oracle, const CostProfile& costs,
    const Budget& budget, std::span<const NodeId> selected,
    const TenmOptions& options) {
  if (absl::Status s = CheckSizes(oracle, costs); !s.ok()) return s;
  if (absl::Status s = CheckDelta(options.delta); !s.ok()) return s;
  for (NodeId j : selected) {
    if (j < 0 || j >= oracle.graph().num_nodes() || !costs.eligible(j)) {
      return absl::InvalidArgumentError(
          absl::StrCat("selected node ", j, " is not an eligible node"));
    }
  }
  const Rational scale = options.payment_scale == PaymentScale::kLiteral
                             ? budget.value()
                             : budget.value() / options.delta;
  std::vector<PaymentTrace> traces(selected.size());
  const int workers = std::clamp<int>(options.workers, 1,
                                      std::max<int>(1, selected.size()));
  if (workers == 1) {
    for (size_t i = 0; i < selected.size(); ++i) {
      traces[i] = PriceWinner(oracle, costs, scale, selected[i]);
    }
    return traces;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < selected.size(); i = next++) {
        traces[i] = PriceWinner(oracle, costs, scale, selected[i]);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return traces;
}

absl::StatusOr<std::map<NodeId, Rational>> NpmPrices(
    const CoverageOracle& oracle, const CostProfile& costs,
    const Budget& budget, std::span<const NodeId> selected,
    const TenmOptions& options) {
  absl::StatusOr<std::vector<PaymentTrace>> traces =
      NpmPriceTraces(oracle, costs, budget, selected, options);
  if (!traces.ok()) return traces.status();
  std::map<NodeId, Rational> prices;
  for (const PaymentTrace& t : *traces) prices[t.winner] = t.payment;
  return prices;
}

absl::StatusOr<NotifierOutcome> TenmRun(const CoverageOracle& oracle,
                                        const CostProfile& costs,
                                        const Budget& budget,
                                        const TenmOptions& options) {
  auto start = std::chrono::steady_clock::now();
  absl::StatusOr<NotifierSelection> sel =
      NamSelect(oracle, costs, budget, options.delta);
  if (!sel.ok()) return sel.status();
  absl::StatusOr<std::map<NodeId, Rational>> prices =
      NpmPrices(oracle, costs, budget, sel->selected, options);
  if (!prices.ok()) return prices.status();
  NotifierOutcome out;
  out.selected = std::move(sel->selected);
  out.notified = std::move(sel->notified);
  out.payments = std::move(*prices);
  out.delta = options.delta;
  out.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

Rational NotifierUtility(const Rational& true_cost, const Rational& payment,
                         bool selected) {
  return selected ? payment - true_cost : Rational(0);
}

absl::StatusOr<NotifierOutcome> Ntbfm(const CoverageOracle& oracle,
                                      const CostProfile& costs,
                                      const Budget& budget) {
  if (absl::Status s = CheckSizes(oracle, costs); !s.ok()) return s;
  auto start = std::chrono::steady_clock::now();
  const SocialGraph& graph = oracle.graph();
  std::vector<HeapEntry> order;
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    if (!costs.eligible(i) || graph.Degree(i) == 0) continue;
    order.push_back({Rational(graph.Degree(i)) / costs.cost(i), i,
                     graph.Degree(i), 0});
  }
  std::sort(order.begin(), order.end(),
            [](const HeapEntry& a, const HeapEntry& b) {
              return HeapLess{}(b, a);
            });
  NotifierOutcome out;
  out.delta = Rational(1);
  Rational spent(0);
  for (const HeapEntry& e : order) {
    const Rational& c = costs.cost(e.node);
    if (spent + c > budget.value()) break;
    spent += c;
    out.selected.push_back(e.node);
    out.payments[e.node] = c;
  }
  out.notified = NotifiedBy(oracle, out.selected);
  out.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

absl::StatusOr<NotifierOutcome> Psm(const CoverageOracle& oracle,
                                    const CostProfile& costs,
                                    const Budget& budget) {
  if (absl::Status s = CheckSizes(oracle, costs); !s.ok()) return s;
  auto start = std::chrono::steady_clock::now();
  std::vector<NodeId> order;
  for (NodeId i = 0; i < costs.size(); ++i) {
    if (costs.eligible(i)) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (costs.cost(a) != costs.cost(b)) return costs.cost(a) < costs.cost(b);
    return a < b;
  });
  size_t k = 0;
  for (size_t m = 1; m <= order.size(); ++m) {
    if (costs.cost(order[m - 1]) <= budget.value() / static_cast<int64_t>(m)) {
      k = m;
    }
  }
  NotifierOutcome out;
  out.delta = Rational(1);
  if (k > 0) {
    Rational pay = budget.value() / static_cast<int64_t>(k);
    if (k < order.size()) pay = std::min(pay, costs.cost(order[k]));
    for (size_t m = 0; m < k; ++m) {
      out.selected.push_back(order[m]);
      out.payments[order[m]] = pay;
    }
  }
  out.notified = NotifiedBy(oracle, out.selected);
  out.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

absl::Status ValidateNotifierOutcome(const NotifierOutcome& outcome,
                                     const CostProfile& costs,
                                     const Budget& budget) {
  if (outcome.payments.size() != outcome.selected.size()) {
    return absl::InternalError("payments are not defined exactly on winners");
  }
  for (NodeId j : outcome.selected) {
    auto it = outcome.payments.find(j);
    if (it == outcome.payments.end()) {
      return absl::InternalError(absl::StrCat("winner ", j, " has no payment"));
    }
    if (it->second < costs.cost(j)) {
      return absl::InternalError(absl::StrCat(
          "winner ", j, " is paid ", FormatRational(it->second),
          " below its reported cost ", FormatRational(costs.cost(j))));
    }
  }
  if (outcome.TotalPayment() > budget.value()) {
    return absl::InternalError(
        absl::StrCat("total payment ", FormatRational(outcome.TotalPayment()),
                     " exceeds budget ", FormatRational(budget.value())));
  }
  return absl::OkStatus();
}

}  // namespace crowdmech
