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

#ifndef CROWDMECH_REPORT_H_
#define CROWDMECH_REPORT_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "crowdmech/ectai.h"
#include "crowdmech/graph.h"
#include "crowdmech/prob.h"
#include "crowdmech/rational.h"
#include "crowdmech/tenm.h"
#include "crowdmech/wipd.h"
#include "json.hpp"

namespace crowdmech {

// Insertion-ordered so reports read in a fixed, human-friendly order.
using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

// Integers as JSON numbers, other values as "p/q" strings.
Json RationalJson(const Rational& value);

// 64-bit FNV-1a as 16 hex digits.
std::string Fnv1aHex(absl::string_view bytes);

// {"schema_version", "command", "config", "config_digest"}; the digest
// covers config.dump().
Json ReportEnvelope(absl::string_view command, const Json& config);

Json GraphInfoJson(const SocialGraph& graph);

// Node ids are reported as original ids.
Json NotifierOutcomeJson(const NotifierOutcome& outcome,
                         const SocialGraph& graph, const Budget& budget,
                         bool timing);
Json PaymentTracesJson(std::span<const PaymentTrace> traces,
                       const SocialGraph& graph);

// `label` maps ranking ids to the reported ids.
Json RankingJson(const QualityRanking& ranking,
                 const std::function<int64_t(NodeId)>& label);

// Devices are reported as `device_ids[i]`; tasks 1-based.
Json AuctionOutcomeJson(const AuctionOutcome& outcome,
                        std::span<const int> device_ids, bool with_trace);

struct MetricRow {
  int round = 0;
  std::string mechanism;
  std::string metric;
  std::string value;
};

// Header "round,mechanism,metric,value".
void WriteMetricCsv(std::span<const MetricRow> rows, std::ostream& out);

std::string FormatDouble(double value);

}  // namespace crowdmech

#endif  // CROWDMECH_REPORT_H_
