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

#include "crowdmech/wipd.h"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/cord.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "json.hpp"

namespace crowdmech {
namespace {

using Json = nlohmann::json;

absl::StatusOr<Rational> JsonRational(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<int64_t>());
  if (j.is_string()) return ParseRational(j.get<std::string>());
  if (j.is_number()) {
    std::ostringstream s;
    s.precision(15);
    s << j.get<double>();
    return ParseRational(s.str());
  }
  return absl::InvalidArgumentError("value must be a number or string");
}

// Sum of `weights` over every subset of `tasks`, indexed by the compact
// bit pattern x over positions of `tasks`.
std::vector<Rational> SubsetSums(std::span<const int> tasks,
                                 std::span<const Rational> weights) {
  const size_t k = tasks.size();
  std::vector<Rational> sums(size_t{1} << k);
  for (size_t x = 1; x < sums.size(); ++x) {
    int low = __builtin_ctzll(x);
    sums[x] = sums[x & (x - 1)] + weights[tasks[low]];
  }
  return sums;
}

TaskSet Expand(uint64_t x, std::span<const int> tasks) {
  TaskSet s = 0;
  while (x) {
    int low = __builtin_ctzll(x);
    s |= TaskSet{1} << tasks[low];
    x &= x - 1;
  }
  return s;
}

std::string PriceList(std::span<const Rational> prices) {
  return absl::StrJoin(prices, " ", [](std::string* out, const Rational& r) {
    out->append(FormatRational(r));
  });
}

}  // namespace

std::vector<int> TaskList(TaskSet s) {
  std::vector<int> out;
  while (s) {
    out.push_back(__builtin_ctzll(s));
    s &= s - 1;
  }
  return out;
}

TaskSet TaskSetOf(std::span<const int> tasks) {
  TaskSet s = 0;
  for (int t : tasks) s |= TaskSet{1} << t;
  return s;
}

std::string FormatTaskSet(TaskSet s) {
  return absl::StrCat(
      "{",
      absl::StrJoin(TaskList(s), ",",
                    [](std::string* out, int t) { absl::StrAppend(out, "t", t + 1); }),
      "}");
}

bool TaskSetBefore(TaskSet a, TaskSet b) {
  if (a == b) return false;
  if (TaskCount(a) != TaskCount(b)) return TaskCount(a) < TaskCount(b);
  TaskSet diff = a ^ b;
  return (a & diff & (~diff + 1)) != 0;
}

absl::StatusOr<Valuation> Valuation::Additive(
    std::span<const Rational> values) {
  const int m = static_cast<int>(values.size());
  if (m > kMaxDemandTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("at most ", kMaxDemandTasks, " tasks supported"));
  }
  for (const Rational& v : values) {
    if (v < 0) return absl::InvalidArgumentError("negative task value");
  }
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  return Valuation(m, SubsetSums(all, values));
}

absl::StatusOr<Valuation> Valuation::FromListed(
    int m, const std::vector<std::pair<TaskSet, Rational>>& listed) {
  if (m < 0 || m > kMaxDemandTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("task count must be in [0, ", kMaxDemandTasks, "]"));
  }
  std::vector<Rational> table(size_t{1} << m, Rational(0));
  std::vector<bool> is_listed(table.size(), false);
  for (const auto& [s, value] : listed) {
    if (s & ~AllTasks(m)) {
      return absl::InvalidArgumentError("bundle names an unknown task");
    }
    if (value < 0) return absl::InvalidArgumentError("negative bundle value");
    if (s == 0 && value != 0) {
      return absl::InvalidArgumentError("the empty bundle must be valued 0");
    }
    table[s] = value;
    is_listed[s] = true;
  }
  for (size_t s = 1; s < table.size(); ++s) {
    for (TaskSet rest = s; rest; rest &= rest - 1) {
      TaskSet sub = s & ~(rest & (~rest + 1));
      if (table[sub] > table[s]) {
        if (is_listed[s]) {
          return absl::InvalidArgumentError(absl::StrCat(
              "valuation is not monotone at ", FormatTaskSet(s)));
        }
        table[s] = table[sub];
      }
    }
  }
  return Valuation(m, std::move(table));
}

Valuation Valuation::Zero(int m) {
  return Valuation(m, std::vector<Rational>(size_t{1} << m, Rational(0)));
}

Valuation Valuation::Scaled(const Rational& factor) const {
  std::vector<Rational> table = table_;
  for (Rational& v : table) v *= factor;
  return Valuation(m_, std::move(table));
}

bool Valuation::IsAdditive() const {
  for (size_t s = 1; s < table_.size(); ++s) {
    TaskSet low = s & (~s + 1);
    if (table_[s] != table_[s & ~low] + table_[low]) return false;
  }
  return true;
}

absl::StatusOr<ValuationSet> ParseValuationJson(std::istream& in) {
  Json doc = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("valuation file is not a JSON object");
  }
  if (!doc.contains("tasks") || !doc["tasks"].is_number_integer() ||
      !doc.contains("devices") || !doc["devices"].is_object()) {
    return absl::InvalidArgumentError(
        "valuation JSON needs integer \"tasks\" and object \"devices\"");
  }
  ValuationSet out;
  out.num_tasks = doc["tasks"].get<int>();
  if (out.num_tasks < 1 || out.num_tasks > kMaxDemandTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("tasks must be in [1, ", kMaxDemandTasks, "]"));
  }
  std::vector<std::pair<int, Valuation>> parsed;
  for (const auto& [key, spec] : doc["devices"].items()) {
    int id;
    if (!absl::SimpleAtoi(key, &id)) {
      return absl::InvalidArgumentError(
          absl::StrCat("device key \"", key, "\" is not an integer"));
    }
    absl::StatusOr<Valuation> v = absl::InvalidArgumentError(
        absl::StrCat("device ", id, ": expected a bundle list or additive"));
    if (spec.is_object() && spec.contains("additive") &&
        spec["additive"].is_array()) {
      std::vector<Rational> values;
      for (const Json& x : spec["additive"]) {
        absl::StatusOr<Rational> r = JsonRational(x);
        if (!r.ok()) return r.status();
        values.push_back(*r);
      }
      if (static_cast<int>(values.size()) != out.num_tasks) {
        return absl::InvalidArgumentError(
            absl::StrCat("device ", id, ": additive list needs ",
                         out.num_tasks, " values"));
      }
      v = Valuation::Additive(values);
    } else if (spec.is_array()) {
      std::vector<std::pair<TaskSet, Rational>> listed;
      for (const Json& entry : spec) {
        if (!entry.is_object() || !entry.contains("subset") ||
            !entry["subset"].is_array() || !entry.contains("value")) {
          return absl::InvalidArgumentError(absl::StrCat(
              "device ", id, ": entries need \"subset\" and \"value\""));
        }
        TaskSet s = 0;
        for (const Json& t : entry["subset"]) {
          if (!t.is_number_integer() || t.get<int>() < 1 ||
              t.get<int>() > out.num_tasks) {
            return absl::InvalidArgumentError(
                absl::StrCat("device ", id, ": bad task id in subset"));
          }
          s |= TaskSet{1} << (t.get<int>() - 1);
        }
        absl::StatusOr<Rational> r = JsonRational(entry["value"]);
        if (!r.ok()) return r.status();
        listed.emplace_back(s, *r);
      }
      v = Valuation::FromListed(out.num_tasks, listed);
    }
    if (!v.ok()) return v.status();
    parsed.emplace_back(id, *std::move(v));
  }
  std::sort(parsed.begin(), parsed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [id, v] : parsed) {
    out.device_ids.push_back(id);
    out.valuations.push_back(std::move(v));
  }
  return out;
}

absl::StatusOr<DemandPolicy> ParseDemandPolicy(absl::string_view name) {
  if (name == "net-gain") return DemandPolicy::kNetGain;
  if (name == "literal" || name == "paper-literal") {
    return DemandPolicy::kLiteral;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown demand policy \"", name,
                   "\" (expected net-gain or literal)"));
}

absl::string_view DemandPolicyName(DemandPolicy policy) {
  return policy == DemandPolicy::kNetGain ? "net-gain" : "literal";
}

absl::StatusOr<TaskSet> BruteForceDemand(const Valuation& v, TaskSet holdings,
                                         std::span<const Rational> prices,
                                         const Rational& epsilon,
                                         DemandPolicy policy) {
  const int m = v.num_tasks();
  if (m > kMaxDemandTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("demand enumeration supports at most ", kMaxDemandTasks,
                     " tasks, got ", m));
  }
  if (static_cast<int>(prices.size()) != m) {
    return absl::InvalidArgumentError("price vector size differs from m");
  }
  std::vector<int> free = TaskList(AllTasks(m) & ~holdings);
  std::vector<Rational> bumped(m);
  for (int t = 0; t < m; ++t) bumped[t] = prices[t] + epsilon;
  std::vector<Rational> sums = SubsetSums(free, bumped);
  // Payment for the held tasks is common to every F; only F's bumped prices
  // and the valuation change differ.
  TaskSet best = 0;
  Rational best_key = -v(holdings);  // F = empty
  for (uint64_t x = 1; x < sums.size(); ++x) {
    TaskSet f = Expand(x, free);
    Rational key = sums[x] - v(holdings | f);
    bool better = policy == DemandPolicy::kNetGain ? key > best_key
                                                   : key < best_key;
    if (better || (key == best_key && TaskSetBefore(f, best))) {
      best = f;
      best_key = key;
    }
  }
  return best;
}

absl::StatusOr<TaskSet> ValuationDemandOracle::Demand(
    int, int device, TaskSet holdings, std::span<const Rational> prices,
    const Rational& epsilon) const {
  if (device < 0 || device >= static_cast<int>(valuations_.size())) {
    return absl::OutOfRangeError(absl::StrCat("unknown device ", device));
  }
  return BruteForceDemand(valuations_[device], holdings, prices, epsilon,
                          policy_);
}

absl::StatusOr<TaskSet> ScriptedDemandOracle::Demand(
    int pass, int device, TaskSet, std::span<const Rational>,
    const Rational&) const {
  auto it = script_.find({pass, device});
  return it == script_.end() ? TaskSet{0} : it->second;
}

absl::StatusOr<ScriptedDemandOracle> ParseDemandScriptCsv(std::istream& in) {
  ScriptedDemandOracle oracle;
  std::string line;
  int line_no = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text[0] == '#') continue;
    ++rows;
    std::vector<absl::string_view> f = absl::StrSplit(text, ',');
    int pass, device;
    if (f.size() < 2 || !absl::SimpleAtoi(f[0], &pass) ||
        !absl::SimpleAtoi(f[1], &device)) {
      if (rows == 1) continue;  // header
      return absl::InvalidArgumentError(
          absl::StrCat("script line ", line_no, ": expected pass,device,tasks"));
    }
    TaskSet demand = 0;
    if (f.size() >= 3) {
      for (absl::string_view tok :
           absl::StrSplit(f[2], absl::ByAnyChar(" ;"), absl::SkipEmpty())) {
        int t;
        if (!absl::SimpleAtoi(tok, &t) || t < 1 || t > 64) {
          return absl::InvalidArgumentError(
              absl::StrCat("script line ", line_no, ": bad task \"", tok, "\""));
        }
        demand |= TaskSet{1} << (t - 1);
      }
    }
    oracle.Set(pass, device, demand);
  }
  return oracle;
}

int DefaultMaxRounds(std::span<const Valuation> valuations,
                     const Rational& epsilon) {
  int m = 0;
  Rational maxv(0);
  for (const Valuation& v : valuations) {
    m = std::max(m, v.num_tasks());
    maxv = std::max(maxv, v(AllTasks(v.num_tasks())));
  }
  return static_cast<int>(Ceil(maxv * m / epsilon)) + m;
}

absl::StatusOr<AuctionOutcome> WipdRun(int num_tasks, int num_devices,
                                       const DemandOracle& oracle,
                                       const AuctionOptions& options) {
  if (options.epsilon <= 0) {
    return absl::InvalidArgumentError("epsilon must be > 0");
  }
  if (options.max_rounds < 1) {
    return absl::InvalidArgumentError("max_rounds must be >= 1");
  }
  if (num_tasks < 0 || num_tasks > 63 || num_devices < 0) {
    return absl::InvalidArgumentError("task count must be in [0, 63]");
  }
  AuctionOutcome out;
  out.prices.assign(num_tasks, Rational(0));
  out.allocation.assign(num_devices, 0);
  const TaskSet all = AllTasks(num_tasks);
  for (int pass = 1; pass <= options.max_rounds; ++pass) {
    bool quiet = true;
    for (int i = 0; i < num_devices; ++i) {
      absl::StatusOr<TaskSet> f = oracle.Demand(
          pass, i, out.allocation[i], out.prices, options.epsilon);
      if (!f.ok()) return f.status();
      if ((*f & ~all) || (*f & out.allocation[i])) {
        return absl::InternalError(absl::StrCat(
            "pass ", pass, ": device ", i, " demanded ", FormatTaskSet(*f),
            " outside the tasks it does not hold"));
      }
      if (*f != 0) {
        quiet = false;
        out.allocation[i] |= *f;
        for (int l = 0; l < num_devices; ++l) {
          if (l != i) out.allocation[l] &= ~*f;
        }
        for (int t : TaskList(*f)) out.prices[t] += options.epsilon;
      }
      out.trace.push_back({pass, i, *f, out.prices});
    }
    out.rounds = pass;
    if (quiet) {
      out.payments.assign(num_devices, Rational(0));
      for (int i = 0; i < num_devices; ++i) {
        for (int t : TaskList(out.allocation[i])) {
          out.payments[i] += out.prices[t];
        }
      }
      return out;
    }
  }
  std::ostringstream trace;
  WriteTraceCsv(out, trace);
  absl::Status status = absl::ResourceExhaustedError(absl::StrCat(
      "auction did not terminate within ", options.max_rounds, " rounds"));
  status.SetPayload(kTracePayloadUrl, absl::Cord(trace.str()));
  return status;
}

absl::StatusOr<AuctionOutcome> WipdRun(std::span<const Valuation> valuations,
                                       DemandPolicy policy,
                                       AuctionOptions options) {
  int m = valuations.empty() ? 0 : valuations.front().num_tasks();
  for (const Valuation& v : valuations) {
    if (v.num_tasks() != m) {
      return absl::InvalidArgumentError("valuations disagree on task count");
    }
  }
  if (options.epsilon <= 0) {
    return absl::InvalidArgumentError("epsilon must be > 0");
  }
  if (options.max_rounds <= 0) {
    options.max_rounds = std::max(1, DefaultMaxRounds(valuations, options.epsilon));
  }
  ValuationDemandOracle oracle(
      std::vector<Valuation>(valuations.begin(), valuations.end()), policy);
  return WipdRun(m, static_cast<int>(valuations.size()), oracle, options);
}

Rational DeviceUtility(const Rational& payment, const Rational& value,
                       bool allocated) {
  return allocated ? payment - value : Rational(0);
}

void WriteTraceCsv(const AuctionOutcome& outcome, std::ostream& out) {
  out << "round,device,demanded,prices_after\n";
  for (const TraceRow& row : outcome.trace) {
    out << row.pass << ',' << row.device << ",\""
        << FormatTaskSet(row.demanded) << "\"," << PriceList(row.prices_after)
        << '\n';
  }
}

absl::Status ValidateAuctionOutcome(const AuctionOutcome& outcome,
                                    int num_tasks, const Rational& epsilon) {
  const int n = static_cast<int>(outcome.allocation.size());
  std::vector<TaskSet> holdings(n, 0);
  std::vector<Rational> prices(num_tasks, Rational(0));
  for (const TraceRow& row : outcome.trace) {
    if (row.device < 0 || row.device >= n) {
      return absl::InternalError("trace names an unknown device");
    }
    if (row.demanded & holdings[row.device]) {
      return absl::InternalError(absl::StrCat(
          "pass ", row.pass, ": device ", row.device,
          " demanded a task it already holds"));
    }
    holdings[row.device] |= row.demanded;
    for (int l = 0; l < n; ++l) {
      if (l != row.device) holdings[l] &= ~row.demanded;
    }
    for (int t : TaskList(row.demanded)) prices[t] += epsilon;
    if (row.prices_after != prices) {
      return absl::InternalError(absl::StrCat(
          "pass ", row.pass, ": prices do not rise by exactly epsilon per "
          "demand"));
    }
    TaskSet seen = 0;
    for (TaskSet h : holdings) {
      if (seen & h) {
        return absl::InternalError(
            absl::StrCat("pass ", row.pass, ": holdings overlap"));
      }
      seen |= h;
    }
  }
  if (holdings != outcome.allocation || prices != outcome.prices) {
    return absl::InternalError("final state does not match the trace");
  }
  for (const Rational& p : prices) {
    if (p < 0 || (p / epsilon).denominator() != 1) {
      return absl::InternalError("price is off the epsilon lattice");
    }
  }
  if (outcome.payments.size() != outcome.allocation.size()) {
    return absl::InternalError("payments size differs from devices");
  }
  for (int i = 0; i < n; ++i) {
    Rational sum(0);
    for (int t : TaskList(outcome.allocation[i])) sum += prices[t];
    if (sum != outcome.payments[i]) {
      return absl::InternalError(absl::StrCat(
          "device ", i, " payment ", FormatRational(outcome.payments[i]),
          " differs from its bundle's prices ", FormatRational(sum)));
    }
  }
  return absl::OkStatus();
}

std::optional<StabilityViolation> CheckEpsilonStability(
    const AuctionOutcome& outcome, std::span<const Valuation> valuations,
    const Rational& epsilon) {
  const int m = static_cast<int>(outcome.prices.size());
  std::vector<int> all(m);
  std::iota(all.begin(), all.end(), 0);
  std::vector<Rational> sums = SubsetSums(all, outcome.prices);
  for (size_t i = 0; i < valuations.size(); ++i) {
    const Valuation& v = valuations[i];
    TaskSet held = outcome.allocation[i];
    Rational current = sums[held] - v(held);
    for (TaskSet s = 0; s < sums.size(); ++s) {
      Rational gain = sums[s] - v(s) - current;
      Rational allowance = epsilon * static_cast<int64_t>(m + TaskCount(s));
      if (gain > allowance) {
        return StabilityViolation{static_cast<int>(i), s, gain, allowance};
      }
    }
  }
  return std::nullopt;
}

absl::StatusOr<GsResult> GsCheck(const Valuation& v, int grid_max) {
  const int m = v.num_tasks();
  if (m > kMaxGsTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("gross-substitutes check supports m <= ", kMaxGsTasks));
  }
  if (grid_max < 0) return absl::InvalidArgumentError("grid_max must be >= 0");
  const int base = grid_max + 1;
  size_t points = 1;
  for (int t = 0; t < m; ++t) points *= base;
  const size_t bundles = size_t{1} << m;
  auto decode = [&](size_t code) {
    std::vector<int64_t> p(m);
    for (int t = 0; t < m; ++t) {
      p[t] = code % base;
      code /= base;
    }
    return p;
  };
  // demand[code]: bit s set when bundle s minimizes price minus value.
  std::vector<uint64_t> demand(points, 0);
  for (size_t code = 0; code < points; ++code) {
    std::vector<int64_t> p = decode(code);
    Rational best;
    for (TaskSet s = 0; s < bundles; ++s) {
      Rational cost(0);
      for (int t : TaskList(s)) cost += p[t];
      cost -= v(s);
      if (s == 0 || cost < best) {
        best = cost;
        demand[code] = uint64_t{1} << s;
      } else if (cost == best) {
        demand[code] |= uint64_t{1} << s;
      }
    }
  }
  std::vector<size_t> stride(m, 1);
  for (int t = 1; t < m; ++t) stride[t] = stride[t - 1] * base;
  GsResult result;
  for (size_t low = 0; low < points; ++low) {
    std::vector<int64_t> p = decode(low);
    // Enumerate r >= p on the grid as an odometer.
    std::vector<int64_t> r = p;
    while (true) {
      size_t high = 0;
      TaskSet raised = 0;
      for (int t = 0; t < m; ++t) {
        high += r[t] * stride[t];
        if (r[t] > p[t]) raised |= TaskSet{1} << t;
      }
      for (uint64_t d = demand[low]; d; d &= d - 1) {
        TaskSet s = __builtin_ctzll(d);
        TaskSet kept = s & ~raised;
        bool ok = false;
        for (uint64_t e = demand[high]; e && !ok; e &= e - 1) {
          TaskSet x = __builtin_ctzll(e);
          ok = (x & ~raised) == kept;
        }
        if (!ok) {
          result.gross_substitutes = false;
          result.witness = GsWitness{p, r, s};
          return result;
        }
      }
      int t = 0;
      while (t < m && r[t] == grid_max) {
        r[t] = p[t];
        ++t;
      }
      if (t == m) break;
      ++r[t];
    }
  }
  return result;
}

absl::StatusOr<AuctionOutcome> GreedyBaseline(std::span<const BundleBid> bids,
                                              int num_tasks, int num_devices) {
  std::vector<const BundleBid*> order;
  for (const BundleBid& b : bids) {
    if (b.device < 0 || b.device >= num_devices) {
      return absl::InvalidArgumentError(
          absl::StrCat("bid names unknown device ", b.device));
    }
    if (b.bundle == 0 || (b.bundle & ~AllTasks(num_tasks))) {
      return absl::InvalidArgumentError(absl::StrCat(
          "device ", b.device, " bid needs a non-empty bundle of known tasks"));
    }
    if (b.bid < 0) return absl::InvalidArgumentError("negative bid");
    order.push_back(&b);
  }
  // bid / sqrt(k) compared exactly as bid_a^2 * k_b < bid_b^2 * k_a.
  std::sort(order.begin(), order.end(),
            [](const BundleBid* a, const BundleBid* b) {
              Rational lhs = a->bid * a->bid * int64_t{TaskCount(b->bundle)};
              Rational rhs = b->bid * b->bid * int64_t{TaskCount(a->bundle)};
              if (lhs != rhs) return lhs < rhs;
              return a->device < b->device;
            });
  AuctionOutcome out;
  out.allocation.assign(num_devices, 0);
  out.payments.assign(num_devices, Rational(0));
  out.prices.assign(num_tasks, Rational(0));
  TaskSet taken = 0;
  for (const BundleBid* b : order) {
    if (b->bundle & taken) continue;
    if (out.allocation[b->device] != 0) continue;
    taken |= b->bundle;
    out.allocation[b->device] = b->bundle;
    out.payments[b->device] = b->bid;
  }
  out.rounds = 1;
  return out;
}

}  // namespace crowdmech
