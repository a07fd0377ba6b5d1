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

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "crowdmech/coverage.h"
#include "crowdmech/ectai.h"
#include "crowdmech/experiment.h"
#include "crowdmech/graph.h"
#include "crowdmech/prob.h"
#include "crowdmech/random.h"
#include "crowdmech/rational.h"
#include "crowdmech/report.h"
#include "crowdmech/tenm.h"
#include "crowdmech/wipd.h"

namespace crowdmech {
namespace {

// Stream coordinates for CLI-generated inputs.
enum CliStream : uint64_t {
  kCliCosts = 101,
  kCliValues = 102,
  kCliBundles = 103,
};

struct Flags {
  std::string graph;
  std::string budget = "15000";
  std::string delta = "2";
  std::string epsilon = "1";
  uint64_t seed = 0;
  std::string cost_range;
  std::string dist = "uniform";
  std::optional<double> mu;
  std::optional<double> sigma;
  int f = 3;
  int g = 5;
  double deviation_frac = 0.0;
  int rounds = 5;
  std::string out;
  std::string format = "json";

  int workers = 1;
  bool timing = false;
  std::string payment_scale = "literal";
  std::string policy = "net-gain";
  std::string costs;
  std::string peaks;
  std::string plan;
  std::string valuations;
  std::string script;
  std::string bids;
  std::string trace_out;
  std::string id_map;
  std::string mechanism = "tenm";
  std::string cost_drop = "5";
  std::string inflation = "6/5";
  int tasks = 8;
  int devices = 0;
  int max_rounds = 0;
  int nodes = 100;
  double edge_prob = 0.05;
  bool with_trace = false;
  int64_t degree = -1;
  double p = -1.0;
  std::optional<double> kappa;
  int64_t trials = 0;
  std::optional<int64_t> node;
};

// A failed command: exit code plus message.
struct Failure {
  int code;
  std::string message;
};

template <typename T>
using Result = std::variant<T, Failure>;

Failure ConfigError(const absl::Status& s) {
  return {kExitConfigError, std::string(s.message())};
}
Failure Violation(absl::string_view what) {
  return {kExitInvariantViolation, std::string(what)};
}

// Everything a command produces: a JSON report and the CSV rows for it.
struct Output {
  Json json;
  std::vector<MetricRow> rows;
  std::optional<Failure> violation;
};

absl::StatusOr<std::pair<int64_t, int64_t>> ParseRange(
    const std::string& text) {
  std::vector<std::string> parts = absl::StrSplit(text, ':');
  int64_t lo, hi;
  if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &lo) ||
      !absl::SimpleAtoi(parts[1], &hi) || lo > hi) {
    return absl::InvalidArgumentError(
        absl::StrCat("--cost-range expects LO:HI with LO <= HI, got \"", text,
                     "\""));
  }
  return std::make_pair(lo, hi);
}

absl::StatusOr<Rational> ParseFlagRational(absl::string_view flag,
                                           const std::string& text) {
  absl::StatusOr<Rational> r = ParseRational(text);
  if (!r.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("--", flag, ": ", r.status().message()));
  }
  return r;
}

absl::StatusOr<std::ifstream> OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  return in;
}

absl::StatusOr<SocialGraph> RequireGraph(const Flags& flags) {
  if (flags.graph.empty()) {
    return absl::InvalidArgumentError("--graph is required");
  }
  return LoadEdgeListFile(flags.graph);
}

std::string RationalText(const Rational& r) { return FormatRational(r); }

// Costs from --costs, else embedded "# cost:" lines, else U[lo, hi] from the
// seed.
absl::StatusOr<CostProfile> LoadCosts(const Flags& flags,
                                      const SocialGraph& graph) {
  if (!flags.costs.empty()) {
    absl::StatusOr<std::ifstream> in = OpenInput(flags.costs);
    if (!in.ok()) return in.status();
    return ParseCostCsv(*in, graph);
  }
  if (flags.cost_range.empty()) {
    absl::StatusOr<std::ifstream> in = OpenInput(flags.graph);
    if (!in.ok()) return in.status();
    absl::StatusOr<std::optional<CostProfile>> embedded =
        ParseEmbeddedCosts(*in, graph);
    if (!embedded.ok()) return embedded.status();
    if (embedded->has_value()) return **embedded;
  }
  absl::StatusOr<std::pair<int64_t, int64_t>> range =
      ParseRange(flags.cost_range.empty() ? "20:50" : flags.cost_range);
  if (!range.ok()) return range.status();
  if (range->first < 1) return absl::InvalidArgumentError("costs must be >= 1");
  Rng rng(MixSeed(flags.seed, 0, kCliCosts));
  std::vector<std::optional<Rational>> costs(graph.num_nodes());
  for (auto& c : costs) c = Rational(rng.UniformInt(range->first, range->second));
  return CostProfile::Create(std::move(costs));
}

Json BaseConfig(const Flags& flags) {
  Json c;
  if (!flags.graph.empty()) c["graph"] = flags.graph;
  c["seed"] = flags.seed;
  return c;
}

void AddRow(Output& out, const std::string& mech, const std::string& metric,
            const std::string& value) {
  out.rows.push_back({1, mech, metric, value});
}

Result<Output> GraphInfo(const Flags& flags) {
  absl::StatusOr<SocialGraph> graph = RequireGraph(flags);
  if (!graph.ok()) return ConfigError(graph.status());
  if (!flags.id_map.empty()) {
    std::ofstream map(flags.id_map);
    if (!map) return ConfigError(absl::NotFoundError("cannot write id map"));
    WriteIdMapCsv(*graph, map);
  }
  Json config;
  config["graph"] = flags.graph;
  Output out;
  out.json = ReportEnvelope("graph-info", config);
  Json info = GraphInfoJson(*graph);
  for (auto& [k, v] : info.items()) {
    out.json[k] = v;
    AddRow(out, "graph", k, v.dump());
  }
  return out;
}

Result<Output> Notifier(const std::string& command, const Flags& flags) {
  absl::StatusOr<SocialGraph> graph = RequireGraph(flags);
  if (!graph.ok()) return ConfigError(graph.status());
  absl::StatusOr<CostProfile> costs = LoadCosts(flags, *graph);
  if (!costs.ok()) return ConfigError(costs.status());
  absl::StatusOr<Rational> b = ParseFlagRational("budget", flags.budget);
  if (!b.ok()) return ConfigError(b.status());
  absl::StatusOr<Budget> budget = Budget::Create(*b);
  if (!budget.ok()) return ConfigError(budget.status());
  absl::StatusOr<Rational> delta = ParseFlagRational("delta", flags.delta);
  if (!delta.ok()) return ConfigError(delta.status());
  TenmOptions opts;
  opts.delta = *delta;
  opts.workers = flags.workers;
  if (flags.payment_scale == "literal") {
    opts.payment_scale = PaymentScale::kLiteral;
  } else if (flags.payment_scale == "critical-value") {
    opts.payment_scale = PaymentScale::kCriticalValue;
  } else {
    return ConfigError(absl::InvalidArgumentError(
        "--payment-scale must be literal or critical-value"));
  }

  CoverageOracle oracle(*graph);
  absl::StatusOr<NotifierOutcome> outcome =
      command == "tenm"    ? TenmRun(oracle, *costs, *budget, opts)
      : command == "ntbfm" ? Ntbfm(oracle, *costs, *budget)
                           : Psm(oracle, *costs, *budget);
  if (!outcome.ok()) return ConfigError(outcome.status());

  Json config = BaseConfig(flags);
  config["budget"] = RationalJson(budget->value());
  if (!flags.costs.empty()) config["costs"] = flags.costs;
  if (!flags.cost_range.empty()) config["cost_range"] = flags.cost_range;
  if (command == "tenm") {
    config["delta"] = RationalJson(opts.delta);
    config["payment_scale"] = flags.payment_scale;
  }
  Output out;
  out.json = ReportEnvelope(command, config);
  Json body = NotifierOutcomeJson(*outcome, *graph, *budget, flags.timing);
  for (auto& [k, v] : body.items()) out.json[k] = v;
  if (command == "tenm" && flags.with_trace) {
    absl::StatusOr<std::vector<PaymentTrace>> traces = NpmPriceTraces(
        oracle, *costs, *budget, outcome->selected, opts);
    if (!traces.ok()) return ConfigError(traces.status());
    out.json["payment_traces"] = PaymentTracesJson(*traces, *graph);
  }

  AddRow(out, command, "winners", std::to_string(outcome->selected.size()));
  AddRow(out, command, "notified", std::to_string(outcome->notified.size()));
  AddRow(out, command, "total_payment", RationalText(outcome->TotalPayment()));
  AddRow(out, command, "budget_feasible",
         outcome->TotalPayment() <= budget->value() ? "1" : "0");
  for (const auto& [node, pay] : outcome->payments) {
    AddRow(out, command, absl::StrCat("payment:", graph->OriginalId(node)),
           RationalText(pay));
  }
  if (flags.timing) {
    AddRow(out, command, "elapsed_ms", FormatDouble(outcome->elapsed_ms));
  }
  if (absl::Status v = ValidateNotifierOutcome(*outcome, *costs, *budget);
      !v.ok()) {
    out.violation = Violation(v.message());
  }
  return out;
}

Result<Output> Ranking(const std::string& command, const Flags& flags) {
  std::vector<NodeId> devices;
  if (!flags.graph.empty()) {
    absl::StatusOr<SocialGraph> graph = LoadEdgeListFile(flags.graph);
    if (!graph.ok()) return ConfigError(graph.status());
    for (int64_t id : graph->original_ids()) {
      if (id > std::numeric_limits<NodeId>::max() || id < 0) {
        return ConfigError(absl::InvalidArgumentError(
            "device ids must fit in 31 bits for ranking"));
      }
      devices.push_back(static_cast<NodeId>(id));
    }
  } else if (flags.devices > 0) {
    for (int i = 1; i <= flags.devices; ++i) devices.push_back(i);
  } else {
    return ConfigError(
        absl::InvalidArgumentError("--graph or --devices is required"));
  }

  absl::StatusOr<Distribution> dist = ParseDistribution(flags.dist);
  if (!dist.ok()) return ConfigError(dist.status());
  UniformPeakSource uniform;
  NormalPeakSource normal(flags.mu.value_or(0.6), flags.sigma.value_or(0.3));
  std::optional<ScriptedPeakSource> scripted;
  if (!flags.peaks.empty()) {
    absl::StatusOr<std::ifstream> in = OpenInput(flags.peaks);
    if (!in.ok()) return ConfigError(in.status());
    absl::StatusOr<ScriptedPeakSource> s = ParsePeakCsv(*in);
    if (!s.ok()) return ConfigError(s.status());
    scripted = *std::move(s);
  }
  const PeakSource& source =
      scripted ? static_cast<const PeakSource&>(*scripted)
      : *dist == Distribution::kUniform ? static_cast<const PeakSource&>(uniform)
                                        : normal;
  RandomBatchPlanner random_planner;
  std::optional<ScriptedBatchPlanner> scripted_planner;
  if (!flags.plan.empty()) {
    absl::StatusOr<std::ifstream> in = OpenInput(flags.plan);
    if (!in.ok()) return ConfigError(in.status());
    absl::StatusOr<ScriptedBatchPlanner> s = ParsePlanCsv(*in);
    if (!s.ok()) return ConfigError(s.status());
    scripted_planner = *std::move(s);
  }
  const BatchPlanner& planner =
      scripted_planner ? static_cast<const BatchPlanner&>(*scripted_planner)
                       : random_planner;
  RankingOptions opts;
  opts.f = flags.f;
  opts.g = flags.g;
  opts.seed = flags.seed;
  opts.workers = flags.workers;
  absl::StatusOr<QualityRanking> ranking =
      command == "ectai" ? EctaiRun(devices, source, planner, opts)
                         : AvrRun(devices, source, planner, opts);
  if (!ranking.ok()) return ConfigError(ranking.status());

  Json config = BaseConfig(flags);
  if (flags.graph.empty()) config["devices"] = flags.devices;
  config["f"] = flags.f;
  config["g"] = flags.g;
  if (!flags.peaks.empty()) {
    config["peaks"] = flags.peaks;
  } else {
    config["dist"] = flags.dist;
    if (*dist == Distribution::kNormal) {
      config["mu"] = flags.mu.value_or(0.6);
      config["sigma"] = flags.sigma.value_or(0.3);
    }
  }
  if (!flags.plan.empty()) config["plan"] = flags.plan;
  Output out;
  out.json = ReportEnvelope(command, config);
  Json body = RankingJson(*ranking, [](NodeId d) { return int64_t{d}; });
  for (auto& [k, v] : body.items()) out.json[k] = v;
  for (const BatchRecord& b : ranking->batches) {
    out.rows.push_back({b.batch, command, "aggregate", FormatDouble(b.aggregate)});
    out.rows.push_back({b.batch, command, "winner", std::to_string(b.winner)});
  }
  if (absl::Status v = ValidateRanking(*ranking, devices); !v.ok()) {
    out.violation = Violation(v.message());
  }
  return out;
}

// Additive valuations U[lo, hi] per task from the seed.
absl::StatusOr<ValuationSet> RandomValuations(const Flags& flags, int n) {
  absl::StatusOr<std::pair<int64_t, int64_t>> range =
      ParseRange(flags.cost_range.empty() ? "30:45" : flags.cost_range);
  if (!range.ok()) return range.status();
  if (range->first < 0) return absl::InvalidArgumentError("values must be >= 0");
  if (flags.tasks < 1 || flags.tasks > kMaxDemandTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("--tasks must be in [1, ", kMaxDemandTasks, "]"));
  }
  Rng rng(MixSeed(flags.seed, 0, kCliValues));
  ValuationSet set;
  set.num_tasks = flags.tasks;
  for (int i = 0; i < n; ++i) {
    std::vector<Rational> values(flags.tasks);
    for (Rational& v : values) v = Rational(rng.UniformInt(range->first, range->second));
    absl::StatusOr<Valuation> v = Valuation::Additive(values);
    if (!v.ok()) return v.status();
    set.device_ids.push_back(i + 1);
    set.valuations.push_back(*std::move(v));
  }
  return set;
}

void AuctionRows(Output& out, const std::string& command,
                 const AuctionOutcome& outcome, std::span<const int> ids) {
  Rational total(0);
  for (size_t i = 0; i < outcome.allocation.size(); ++i) {
    AddRow(out, command, absl::StrCat("payment:", ids[i]),
           RationalText(outcome.payments[i]));
    AddRow(out, command, absl::StrCat("bundle:", ids[i]),
           FormatTaskSet(outcome.allocation[i]));
    total += outcome.payments[i];
  }
  AddRow(out, command, "total_payment", RationalText(total));
  AddRow(out, command, "rounds", std::to_string(outcome.rounds));
}

Result<Output> Wipd(const Flags& flags) {
  absl::StatusOr<Rational> eps = ParseFlagRational("epsilon", flags.epsilon);
  if (!eps.ok()) return ConfigError(eps.status());
  if (*eps <= 0) {
    return ConfigError(absl::InvalidArgumentError("--epsilon must be > 0"));
  }
  absl::StatusOr<DemandPolicy> policy = ParseDemandPolicy(flags.policy);
  if (!policy.ok()) return ConfigError(policy.status());

  Json config = BaseConfig(flags);
  config["epsilon"] = RationalJson(*eps);
  AuctionOptions opts;
  opts.epsilon = *eps;
  opts.max_rounds = flags.max_rounds;

  std::vector<int> ids;
  std::vector<Valuation> valuations;
  int m = flags.tasks;
  std::unique_ptr<DemandOracle> oracle;
  if (!flags.script.empty()) {
    if (flags.devices < 1) {
      return ConfigError(
          absl::InvalidArgumentError("--script needs --devices N"));
    }
    absl::StatusOr<std::ifstream> in = OpenInput(flags.script);
    if (!in.ok()) return ConfigError(in.status());
    absl::StatusOr<ScriptedDemandOracle> s = ParseDemandScriptCsv(*in);
    if (!s.ok()) return ConfigError(s.status());
    oracle = std::make_unique<ScriptedDemandOracle>(*std::move(s));
    for (int i = 0; i < flags.devices; ++i) ids.push_back(i + 1);
    if (opts.max_rounds <= 0) opts.max_rounds = 1000;
    config["script"] = flags.script;
    config["tasks"] = m;
    config["devices"] = flags.devices;
  } else {
    absl::StatusOr<ValuationSet> set = absl::UnknownError("");
    if (!flags.valuations.empty()) {
      absl::StatusOr<std::ifstream> in = OpenInput(flags.valuations);
      if (!in.ok()) return ConfigError(in.status());
      set = ParseValuationJson(*in);
      config["valuations"] = flags.valuations;
    } else {
      set = RandomValuations(flags, flags.devices > 0 ? flags.devices : 4);
      config["value_range"] = flags.cost_range.empty() ? "30:45" : flags.cost_range;
      config["tasks"] = flags.tasks;
      config["devices"] = flags.devices > 0 ? flags.devices : 4;
    }
    if (!set.ok()) return ConfigError(set.status());
    m = set->num_tasks;
    ids = set->device_ids;
    valuations = set->valuations;
    if (opts.max_rounds <= 0) {
      opts.max_rounds = std::max(1, DefaultMaxRounds(valuations, opts.epsilon));
    }
    oracle = std::make_unique<ValuationDemandOracle>(valuations, *policy);
    config["policy"] = flags.policy;
  }
  config["max_rounds"] = opts.max_rounds;

  absl::StatusOr<AuctionOutcome> outcome =
      WipdRun(m, static_cast<int>(ids.size()), *oracle, opts);
  if (!outcome.ok()) {
    if (outcome.status().code() != absl::StatusCode::kResourceExhausted) {
      return ConfigError(outcome.status());
    }
    if (!flags.trace_out.empty()) {
      std::ofstream trace(flags.trace_out);
      if (auto payload = outcome.status().GetPayload(kTracePayloadUrl)) {
        trace << std::string(*payload);
      }
    }
    return Violation(outcome.status().message());
  }
  if (!flags.trace_out.empty()) {
    std::ofstream trace(flags.trace_out);
    WriteTraceCsv(*outcome, trace);
  }
  Output out;
  out.json = ReportEnvelope("wipd", config);
  Json body = AuctionOutcomeJson(*outcome, ids, /*with_trace=*/true);
  for (auto& [k, v] : body.items()) out.json[k] = v;
  AuctionRows(out, "wipd", *outcome, ids);
  if (absl::Status v = ValidateAuctionOutcome(*outcome, m, opts.epsilon);
      !v.ok()) {
    out.violation = Violation(v.message());
  }
  return out;
}

// "device,tasks,bid" with 1-based device ids and 1-based tasks separated by
// spaces or semicolons.
absl::StatusOr<std::vector<BundleBid>> ParseBids(std::istream& in, int* tasks,
                                                 std::vector<int>* ids) {
  std::vector<BundleBid> bids;
  std::string line;
  int line_no = 0;
  int rows = 0;
  int max_task = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text[0] == '#') continue;
    ++rows;
    std::vector<std::string> f = absl::StrSplit(text, ',');
    int device;
    if (f.size() != 3 || !absl::SimpleAtoi(f[0], &device)) {
      if (rows == 1) continue;
      return absl::InvalidArgumentError(
          absl::StrCat("bids line ", line_no, ": expected device,tasks,bid"));
    }
    TaskSet s = 0;
    for (absl::string_view tok :
         absl::StrSplit(f[1], absl::ByAnyChar(" ;"), absl::SkipEmpty())) {
      int t;
      if (!absl::SimpleAtoi(tok, &t) || t < 1 || t > 63) {
        return absl::InvalidArgumentError(
            absl::StrCat("bids line ", line_no, ": bad task"));
      }
      s |= TaskSet{1} << (t - 1);
      max_task = std::max(max_task, t);
    }
    absl::StatusOr<Rational> bid = ParseRational(f[2]);
    if (!bid.ok()) return bid.status();
    auto it = std::find(ids->begin(), ids->end(), device);
    int index = static_cast<int>(it - ids->begin());
    if (it == ids->end()) ids->push_back(device);
    bids.push_back({index, s, *bid});
  }
  *tasks = max_task;
  return bids;
}

Result<Output> Greedy(const Flags& flags) {
  std::vector<BundleBid> bids;
  std::vector<int> ids;
  int m = flags.tasks;
  Json config = BaseConfig(flags);
  if (!flags.bids.empty()) {
    absl::StatusOr<std::ifstream> in = OpenInput(flags.bids);
    if (!in.ok()) return ConfigError(in.status());
    absl::StatusOr<std::vector<BundleBid>> parsed = ParseBids(*in, &m, &ids);
    if (!parsed.ok()) return ConfigError(parsed.status());
    bids = *std::move(parsed);
    config["bids"] = flags.bids;
  } else {
    int n = flags.devices > 0 ? flags.devices : 4;
    absl::StatusOr<ValuationSet> set = RandomValuations(flags, n);
    if (!set.ok()) return ConfigError(set.status());
    Rng rng(MixSeed(flags.seed, 0, kCliBundles));
    std::vector<int> tasks(m);
    for (int t = 0; t < m; ++t) tasks[t] = t;
    for (int i = 0; i < n; ++i) {
      int size = static_cast<int>(rng.UniformInt(1, std::min(3, m)));
      TaskSet s = TaskSetOf(rng.Sample(std::span<const int>(tasks), size));
      bids.push_back({i, s, set->valuations[i](s)});
      ids.push_back(i + 1);
    }
    config["value_range"] = flags.cost_range.empty() ? "30:45" : flags.cost_range;
    config["tasks"] = m;
    config["devices"] = n;
  }
  absl::StatusOr<AuctionOutcome> outcome =
      GreedyBaseline(bids, m, static_cast<int>(ids.size()));
  if (!outcome.ok()) return ConfigError(outcome.status());
  Output out;
  out.json = ReportEnvelope("greedy", config);
  Json body = AuctionOutcomeJson(*outcome, ids, /*with_trace=*/false);
  body.erase("prices");
  body.erase("rounds");
  for (auto& [k, v] : body.items()) out.json[k] = v;
  AuctionRows(out, "greedy", *outcome, ids);
  return out;
}

Result<Output> Estimate(const Flags& flags) {
  int64_t degree = flags.degree;
  std::optional<SocialGraph> graph;
  std::optional<NodeId> node;
  if (flags.node) {
    absl::StatusOr<SocialGraph> g = RequireGraph(flags);
    if (!g.ok()) return ConfigError(g.status());
    graph = *std::move(g);
    node = graph->DenseId(*flags.node);
    if (!node) {
      return ConfigError(absl::OutOfRangeError(
          absl::StrCat("node ", *flags.node, " is not in the graph")));
    }
    degree = graph->Degree(*node);
  }
  if (degree < 0) {
    return ConfigError(
        absl::InvalidArgumentError("--degree (or --graph with --node) required"));
  }
  absl::StatusOr<NotifyModel> model = NotifyModel::Create(degree, flags.p);
  if (!model.ok()) return ConfigError(model.status());

  Json config;
  config["degree"] = degree;
  config["p"] = flags.p;
  if (flags.kappa) config["kappa"] = *flags.kappa;
  if (flags.trials > 0) {
    config["trials"] = flags.trials;
    config["seed"] = flags.seed;
  }
  if (node) {
    config["graph"] = flags.graph;
    config["node"] = *flags.node;
  }
  Output out;
  out.json = ReportEnvelope("estimate", config);
  auto put = [&](const std::string& name, const Json& value) {
    out.json[name] = value;
    AddRow(out, "estimate", name,
           value.is_number_float() ? FormatDouble(value.get<double>())
                                   : value.dump());
  };
  double expected = ExpectedNotified(*model);
  put("expected_notified", expected);
  AtLeastOne alo = AtLeastOneNotified(*model);
  put("at_least_one_exact", alo.exact);
  put("at_least_one_bound", alo.bound);
  if (flags.kappa) {
    absl::StatusOr<double> c = ChernoffTail(expected, *flags.kappa);
    if (!c.ok()) return ConfigError(c.status());
    put("chernoff_tail", *c);
  }
  if (degree > 2) {
    put("degree_tail_threshold", DegreeTailThreshold(degree));
    put("degree_tail_bound", *DegreeTailBound(degree));
  }
  if (flags.trials > 0) {
    absl::StatusOr<MonteCarloResult> mc =
        node ? MonteCarloNotified(*graph, *node, flags.p, flags.trials,
                                  flags.seed, flags.workers)
             : MonteCarloBinomial(*model, flags.trials, flags.seed,
                                  flags.workers);
    if (!mc.ok()) return ConfigError(mc.status());
    put("monte_carlo_mean", mc->mean);
    put("monte_carlo_stderr", mc->stderr_);
  }
  return out;
}

Result<Output> Experiment(const Flags& flags) {
  ExperimentConfig c;
  absl::StatusOr<Mechanism> mech = ParseMechanism(flags.mechanism);
  if (!mech.ok()) return ConfigError(mech.status());
  c.mechanism = *mech;
  c.graph_path = flags.graph;
  c.synthetic_nodes = flags.nodes;
  c.edge_prob = flags.edge_prob;
  c.seed = flags.seed;
  c.rounds = flags.rounds;
  if (!flags.cost_range.empty()) {
    absl::StatusOr<std::pair<int64_t, int64_t>> r = ParseRange(flags.cost_range);
    if (!r.ok()) return ConfigError(r.status());
    c.value_range = *r;
  }
  c.budgets.clear();
  for (absl::string_view part : absl::StrSplit(flags.budget, ',')) {
    absl::StatusOr<Rational> b = ParseFlagRational("budget", std::string(part));
    if (!b.ok()) return ConfigError(b.status());
    c.budgets.push_back(*b);
  }
  absl::StatusOr<Rational> delta = ParseFlagRational("delta", flags.delta);
  if (!delta.ok()) return ConfigError(delta.status());
  c.delta = *delta;
  if (flags.payment_scale == "critical-value") {
    c.payment_scale = PaymentScale::kCriticalValue;
  } else if (flags.payment_scale != "literal") {
    return ConfigError(absl::InvalidArgumentError(
        "--payment-scale must be literal or critical-value"));
  }
  c.deviation_frac = flags.deviation_frac;
  absl::StatusOr<Rational> drop = ParseFlagRational("cost-drop", flags.cost_drop);
  if (!drop.ok()) return ConfigError(drop.status());
  c.cost_drop = *drop;
  absl::StatusOr<Rational> infl = ParseFlagRational("inflation", flags.inflation);
  if (!infl.ok()) return ConfigError(infl.status());
  c.inflation = *infl;
  absl::StatusOr<Distribution> dist = ParseDistribution(flags.dist);
  if (!dist.ok()) return ConfigError(dist.status());
  c.dist = *dist;
  c.mu = flags.mu;
  c.sigma = flags.sigma;
  c.f = flags.f;
  c.g = flags.g;
  c.tasks = flags.tasks;
  if (flags.devices > 0) c.auction_devices = flags.devices;
  absl::StatusOr<Rational> eps = ParseFlagRational("epsilon", flags.epsilon);
  if (!eps.ok()) return ConfigError(eps.status());
  c.epsilon = *eps;
  absl::StatusOr<DemandPolicy> policy = ParseDemandPolicy(flags.policy);
  if (!policy.ok()) return ConfigError(policy.status());
  c.policy = *policy;
  c.workers = flags.workers;
  c.timing = flags.timing;

  absl::StatusOr<ExperimentReport> report = RunExperiment(c);
  if (!report.ok()) return ConfigError(report.status());
  Output out;
  out.json = ExperimentReportJson(*report);
  out.rows = ExperimentMetricRows(*report);
  if (!report->BudgetFeasible()) {
    out.violation = Violation("total payment exceeded the budget");
  } else if (report->HasViolation()) {
    for (const RoundRecord& r : report->rounds) {
      if (r.violation) {
        out.violation = Violation(
            absl::StrCat("round ", r.round, ": ", *r.violation));
        break;
      }
    }
  }
  return out;
}

int Emit(const Flags& flags, const Output& output, std::ostream& out,
         std::ostream& err) {
  std::ostringstream text;
  if (flags.format == "csv") {
    WriteMetricCsv(output.rows, text);
  } else {
    text << output.json.dump(2) << '\n';
  }
  if (flags.out.empty()) {
    out << text.str();
  } else {
    std::ofstream file(flags.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << flags.out << '\n';
      return kExitConfigError;
    }
    file << text.str();
  }
  if (output.violation) {
    err << "invariant violation: " << output.violation->message << '\n';
    return output.violation->code;
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Flags flags;
  CLI::App app{"Crowdsourcing incentive mechanisms: notifier selection, "
               "quality ranking and task auctions."};
  app.name("crowdmech");
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--out", flags.out, "Write the report here");
    sub->add_option("--format", flags.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--workers", flags.workers, "Worker threads")
        ->check(CLI::PositiveNumber);
  };
  auto graph_opt = [&](CLI::App* sub) {
    sub->add_option("--graph", flags.graph, "Edge-list file");
  };
  auto cost_opts = [&](CLI::App* sub) {
    sub->add_option("--budget", flags.budget, "Budget B");
    sub->add_option("--costs", flags.costs, "CSV node_id,cost");
    sub->add_option("--cost-range", flags.cost_range,
                    "LO:HI for generated integer costs");
    sub->add_flag("--timing", flags.timing, "Include wall-clock timings");
  };
  auto dist_opts = [&](CLI::App* sub) {
    sub->add_option("--dist", flags.dist, "uniform or normal")
        ->check(CLI::IsMember({"uniform", "normal"}));
    sub->add_option("--mu", flags.mu, "Normal mean");
    sub->add_option("--sigma", flags.sigma, "Normal standard deviation");
  };

  CLI::App* info = app.add_subcommand("graph-info", "Summarize a graph");
  graph_opt(info);
  info->add_option("--id-map", flags.id_map, "Write original,dense id CSV");
  common(info);

  std::vector<CLI::App*> notifiers;
  for (const char* name : {"tenm", "ntbfm", "psm"}) {
    CLI::App* sub = app.add_subcommand(
        name, absl::StrCat("Tier-1 notifier selection (", name, ")"));
    graph_opt(sub);
    cost_opts(sub);
    common(sub);
    notifiers.push_back(sub);
  }
  notifiers[0]->add_option("--delta", flags.delta, "Allocation divisor");
  notifiers[0]->add_option("--payment-scale", flags.payment_scale,
                           "literal or critical-value");
  notifiers[0]->add_flag("--trace", flags.with_trace,
                         "Include per-winner payment positions");

  std::vector<CLI::App*> rankers;
  for (const char* name : {"ectai", "avr"}) {
    CLI::App* sub = app.add_subcommand(
        name, absl::StrCat("Quality ranking (", name, ")"));
    graph_opt(sub);
    sub->add_option("--devices", flags.devices, "Devices 1..N without a graph");
    sub->add_option("--f", flags.f, "Devices ranked per batch");
    sub->add_option("--g", flags.g, "Reviewers per batch");
    sub->add_option("--peaks", flags.peaks, "CSV batch,reviewer,alpha");
    sub->add_option("--plan", flags.plan,
                    "CSV batch,role,device,position");
    dist_opts(sub);
    common(sub);
    rankers.push_back(sub);
  }

  CLI::App* wipd = app.add_subcommand("wipd", "Ascending task auction");
  wipd->add_option("--valuations", flags.valuations, "Valuation JSON");
  wipd->add_option("--script", flags.script, "CSV pass,device,tasks");
  wipd->add_option("--epsilon", flags.epsilon, "Price increment");
  wipd->add_option("--policy", flags.policy, "net-gain or literal");
  wipd->add_option("--max-rounds", flags.max_rounds, "Pass limit");
  wipd->add_option("--tasks", flags.tasks, "Tasks for generated valuations");
  wipd->add_option("--devices", flags.devices, "Devices");
  wipd->add_option("--cost-range", flags.cost_range, "LO:HI task values");
  wipd->add_option("--trace-out", flags.trace_out, "Write the trace CSV");
  common(wipd);

  CLI::App* greedy = app.add_subcommand("greedy", "Bundle GREEDY baseline");
  greedy->add_option("--bids", flags.bids, "CSV device,tasks,bid");
  greedy->add_option("--tasks", flags.tasks, "Tasks for generated bids");
  greedy->add_option("--devices", flags.devices, "Devices");
  greedy->add_option("--cost-range", flags.cost_range, "LO:HI task values");
  common(greedy);

  CLI::App* estimate = app.add_subcommand("estimate", "Notification estimates");
  estimate->add_option("--degree", flags.degree, "Neighbor count");
  estimate->add_option("--p", flags.p, "Per-neighbor probability")->required();
  estimate->add_option("--kappa", flags.kappa, "Chernoff deviation");
  estimate->add_option("--trials", flags.trials, "Monte Carlo trials");
  estimate->add_option("--node", flags.node, "Node id in --graph");
  graph_opt(estimate);
  common(estimate);

  CLI::App* exp = app.add_subcommand("experiment", "Seeded experiment rounds");
  exp->add_option("--mechanism", flags.mechanism,
                  "tenm|ntbfm|psm|ectai|avr|wipd|greedy");
  graph_opt(exp);
  exp->add_option("--nodes", flags.nodes, "Synthetic graph size");
  exp->add_option("--edge-prob", flags.edge_prob, "Synthetic edge probability");
  exp->add_option("--budget", flags.budget, "Budget or comma-separated sweep");
  exp->add_option("--delta", flags.delta, "TENM allocation divisor");
  exp->add_option("--payment-scale", flags.payment_scale,
                  "literal or critical-value");
  exp->add_option("--epsilon", flags.epsilon, "Auction price increment");
  exp->add_option("--policy", flags.policy, "net-gain or literal");
  exp->add_option("--cost-range", flags.cost_range, "LO:HI costs or values");
  exp->add_option("--f", flags.f, "Devices ranked per batch");
  exp->add_option("--g", flags.g, "Reviewers per batch");
  exp->add_option("--tasks", flags.tasks, "Auction tasks");
  exp->add_option("--devices", flags.devices, "Auction devices");
  exp->add_option("--deviation-frac", flags.deviation_frac,
                  "Fraction of misreporting devices");
  exp->add_option("--cost-drop", flags.cost_drop, "Tier-1 cost reduction");
  exp->add_option("--inflation", flags.inflation, "Valuation scale factor");
  exp->add_option("--rounds", flags.rounds, "Rounds");
  exp->add_flag("--timing", flags.timing, "Include wall-clock timings");
  dist_opts(exp);
  common(exp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  Result<Output> result = Failure{kExitConfigError, "unhandled subcommand"};
  if (name == "graph-info") {
    result = GraphInfo(flags);
  } else if (name == "tenm" || name == "ntbfm" || name == "psm") {
    result = Notifier(name, flags);
  } else if (name == "ectai" || name == "avr") {
    result = Ranking(name, flags);
  } else if (name == "wipd") {
    result = Wipd(flags);
  } else if (name == "greedy") {
    result = Greedy(flags);
  } else if (name == "estimate") {
    result = Estimate(flags);
  } else if (name == "experiment") {
    result = Experiment(flags);
  }
  if (const Failure* f = std::get_if<Failure>(&result)) {
    err << (f->code == kExitConfigError ? "error: " : "invariant violation: ")
        << f->message << '\n';
    return f->code;
  }
  return Emit(flags, std::get<Output>(result), out, err);
}

}  // namespace crowdmech
