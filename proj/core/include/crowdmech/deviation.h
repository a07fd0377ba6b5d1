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

#ifndef CROWDMECH_DEVIATION_H_
#define CROWDMECH_DEVIATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "crowdmech/coverage.h"
#include "crowdmech/ectai.h"
#include "crowdmech/rational.h"
#include "crowdmech/tenm.h"
#include "crowdmech/wipd.h"

namespace crowdmech {

using NotifierMechanism = std::function<absl::StatusOr<NotifierOutcome>(
    const CoverageOracle&, const CostProfile&, const Budget&)>;

NotifierMechanism TenmMechanism(const TenmOptions& options);
NotifierMechanism NtbfmMechanism();
NotifierMechanism PsmMechanism();

struct CostDeviation {
  NodeId device = 0;
  Rational true_cost;
  Rational reported;
  Rational truthful_utility;
  Rational deviating_utility;
};

struct CostSearchResult {
  int64_t probes = 0;
  std::vector<CostDeviation> profitable;
};

// Every eligible device reports every integer cost in [lo, hi] while the
// others stay truthful; records reports that strictly raise the device's
// utility measured against its true cost.
absl::StatusOr<CostSearchResult> CostDeviationSearch(
    const NotifierMechanism& mechanism, const CoverageOracle& oracle,
    const CostProfile& true_costs, const Budget& budget, int64_t lo,
    int64_t hi, bool stop_at_first = false);

struct PeakDeviation {
  size_t reviewer = 0;  // index into the profile
  double true_peak = 0.0;
  double reported = 0.0;
  double truthful_aggregate = 0.0;
  double deviating_aggregate = 0.0;
};

// Reviewer i reports each grid value k * step in [0, 1]; a deviation counts
// when the aggregate moves strictly closer to i's true peak.
absl::StatusOr<std::optional<PeakDeviation>> PeakDeviationSearch(
    std::span<const double> profile, Aggregator aggregator, double step);

struct BidDeviation {
  int device = 0;
  Rational true_value;
  Rational reported;
  Rational truthful_utility;
  Rational deviating_utility;
};

// Each bidder scales its bid by every factor while the others stay
// truthful; utility is payment minus the true bundle value.
absl::StatusOr<std::optional<BidDeviation>> GreedyBidDeviationSearch(
    std::span<const BundleBid> truthful, int num_tasks, int num_devices,
    std::span<const Rational> factors);

struct ScalingFinding {
  int device = 0;
  Rational factor;
  Rational truthful_utility;
  Rational deviating_utility;
};

struct ScalingProbeResult {
  int64_t probes = 0;
  // Runs (truthful or deviating) that hit max_rounds.
  int64_t non_terminating = 0;
  std::vector<ScalingFinding> findings;  // gain > m * epsilon
};

// Each device reports its valuation scaled by each factor; utility is
// payment minus the true value of the allocated bundle.
absl::StatusOr<ScalingProbeResult> WipdScalingProbe(
    std::span<const Valuation> valuations, DemandPolicy policy,
    const AuctionOptions& options, std::span<const Rational> factors);

}  // namespace crowdmech

#endif  // CROWDMECH_DEVIATION_H_
