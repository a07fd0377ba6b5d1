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

#include "crowdmech/report.h"

#include <cstdint>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>

#include "absl/strings/str_format.h"

namespace crowdmech {

Json RationalJson(const Rational& value) {
  if (value.denominator() == 1) return Json(value.numerator());
  return Json(FormatRational(value));
}

std::string Fnv1aHex(absl::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

Json ReportEnvelope(absl::string_view command, const Json& config) {
  Json out;
  out["schema_version"] = kReportSchemaVersion;
  out["command"] = std::string(command);
  out["config"] = config;
  out["config_digest"] = Fnv1aHex(config.dump());
  return out;
}

Json GraphInfoJson(const SocialGraph& graph) {
  Json out;
  out["nodes"] = graph.num_nodes();
  out["edges"] = graph.num_edges();
  int max_degree = 0;
  int isolated = 0;
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    max_degree = std::max(max_degree, graph.Degree(i));
    isolated += graph.Degree(i) == 0;
  }
  out["max_degree"] = max_degree;
  out["isolated_nodes"] = isolated;
  out["mean_degree"] =
      graph.num_nodes() == 0
          ? 0.0
          : 2.0 * static_cast<double>(graph.num_edges()) / graph.num_nodes();
  return out;
}

namespace {

Json OriginalIds(std::span<const NodeId> nodes, const SocialGraph& graph) {
  Json out = Json::array();
  for (NodeId n : nodes) out.push_back(graph.OriginalId(n));
  return out;
}

}  // namespace

Json NotifierOutcomeJson(const NotifierOutcome& outcome,
                         const SocialGraph& graph, const Budget& budget,
                         bool timing) {
  Json out;
  out["selected"] = OriginalIds(outcome.selected, graph);
  out["notified"] = OriginalIds(outcome.notified, graph);
  out["notified_count"] = outcome.notified.size();
  Json payments = Json::object();
  std::vector<std::pair<int64_t, Rational>> sorted;
  for (const auto& [node, pay] : outcome.payments) {
    sorted.emplace_back(graph.OriginalId(node), pay);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [id, pay] : sorted) {
    payments[std::to_string(id)] = RationalJson(pay);
  }
  out["payments"] = payments;
  out["budget"] = RationalJson(budget.value());
  out["total_payment"] = RationalJson(outcome.TotalPayment());
  out["budget_feasible"] = outcome.TotalPayment() <= budget.value();
  if (timing) out["elapsed_ms"] = outcome.elapsed_ms;
  return out;
}

Json PaymentTracesJson(std::span<const PaymentTrace> traces,
                       const SocialGraph& graph) {
  Json out = Json::array();
  for (const PaymentTrace& t : traces) {
    Json jt;
    jt["winner"] = graph.OriginalId(t.winner);
    jt["rerun_selected"] = OriginalIds(t.rerun_selected, graph);
    jt["first_loser"] =
        t.first_loser ? Json(graph.OriginalId(*t.first_loser)) : Json(nullptr);
    Json positions = Json::array();
    for (const PaymentPosition& p : t.positions) {
      Json jp;
      jp["k"] = p.k;
      jp["reference"] =
          p.reference ? Json(graph.OriginalId(*p.reference)) : Json(nullptr);
      jp["winner_gain"] = p.winner_gain;
      jp["reference_gain"] = p.reference_gain;
      jp["nabla"] = p.nabla ? RationalJson(*p.nabla) : Json("inf");
      jp["rho"] = RationalJson(p.rho);
      jp["value"] = RationalJson(p.value);
      positions.push_back(jp);
    }
    jt["positions"] = positions;
    jt["payment"] = RationalJson(t.payment);
    out.push_back(jt);
  }
  return out;
}

Json RankingJson(const QualityRanking& ranking,
                 const std::function<int64_t(NodeId)>& label) {
  Json out;
  Json ordered = Json::array();
  for (NodeId d : ranking.ordered) ordered.push_back(label(d));
  out["ordered"] = ordered;
  Json batches = Json::array();
  for (const BatchRecord& b : ranking.batches) {
    Json jb;
    jb["batch"] = b.batch;
    Json panel = Json::array();
    for (const PanelEntry& e : b.panel) {
      panel.push_back({{"device", label(e.device)}, {"position", e.position}});
    }
    jb["panel"] = panel;
    Json reports = Json::array();
    for (const PeakReport& r : b.reports) {
      reports.push_back({{"reviewer", label(r.reviewer)}, {"alpha", r.alpha}});
    }
    jb["reports"] = reports;
    jb["aggregate"] = b.aggregate;
    jb["winner"] = label(b.winner);
    batches.push_back(jb);
  }
  out["batches"] = batches;
  return out;
}

Json AuctionOutcomeJson(const AuctionOutcome& outcome,
                        std::span<const int> device_ids, bool with_trace) {
  Json out;
  Json alloc = Json::object();
  Json pay = Json::object();
  Rational total(0);
  for (size_t i = 0; i < outcome.allocation.size(); ++i) {
    std::string key = std::to_string(device_ids[i]);
    Json tasks = Json::array();
    for (int t : TaskList(outcome.allocation[i])) tasks.push_back(t + 1);
    alloc[key] = tasks;
    pay[key] = RationalJson(outcome.payments[i]);
    total += outcome.payments[i];
  }
  out["allocation"] = alloc;
  out["payments"] = pay;
  out["total_payment"] = RationalJson(total);
  Json prices = Json::array();
  for (const Rational& p : outcome.prices) prices.push_back(RationalJson(p));
  out["prices"] = prices;
  out["rounds"] = outcome.rounds;
  if (with_trace) {
    Json trace = Json::array();
    for (const TraceRow& row : outcome.trace) {
      Json tasks = Json::array();
      for (int t : TaskList(row.demanded)) tasks.push_back(t + 1);
      Json after = Json::array();
      for (const Rational& p : row.prices_after) after.push_back(RationalJson(p));
      trace.push_back({{"round", row.pass},
                       {"device", device_ids[row.device]},
                       {"demanded", tasks},
                       {"prices_after", after}});
    }
    out["trace"] = trace;
  }
  return out;
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

}  // namespace

void WriteMetricCsv(std::span<const MetricRow> rows, std::ostream& out) {
  out << "round,mechanism,metric,value\n";
  for (const MetricRow& r : rows) {
    out << r.round << ',' << CsvField(r.mechanism) << ','
        << CsvField(r.metric) << ',' << CsvField(r.value) << '\n';
  }
}

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace crowdmech
