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

#include "crowdmech/deviation.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace crowdmech {
namespace {

Rational UtilityOf(const NotifierOutcome& out, NodeId device,
                   const Rational& true_cost) {
  auto it = out.payments.find(device);
  if (it == out.payments.end()) return Rational(0);
  return NotifierUtility(true_cost, it->second, true);
}

}  // namespace

NotifierMechanism TenmMechanism(const TenmOptions& options) {
  return [options](const CoverageOracle& oracle, const CostProfile& costs,
                   const Budget& budget) {
    return TenmRun(oracle, costs, budget, options);
  };
}

NotifierMechanism NtbfmMechanism() { return Ntbfm; }

NotifierMechanism PsmMechanism() { return Psm; }

absl::StatusOr<CostSearchResult> CostDeviationSearch(
    const NotifierMechanism& mechanism, const CoverageOracle& oracle,
    const CostProfile& true_costs, const Budget& budget, int64_t lo,
    int64_t hi, bool stop_at_first) {
  if (lo < 1 || hi < lo) {
    return absl::InvalidArgumentError("deviation grid needs 1 <= lo <= hi");
  }
  absl::StatusOr<NotifierOutcome> truthful =
      mechanism(oracle, true_costs, budget);
  if (!truthful.ok()) return truthful.status();
  CostSearchResult result;
  for (NodeId i = 0; i < true_costs.size(); ++i) {
    if (!true_costs.eligible(i)) continue;
    const Rational& c = true_costs.cost(i);
    Rational base = UtilityOf(*truthful, i, c);
    for (int64_t r = lo; r <= hi; ++r) {
      if (Rational(r) == c) continue;
      absl::StatusOr<NotifierOutcome> dev =
          mechanism(oracle, true_costs.WithCost(i, Rational(r)), budget);
      if (!dev.ok()) return dev.status();
      ++result.probes;
      Rational u = UtilityOf(*dev, i, c);
      if (u > base) {
        result.profitable.push_back({i, c, Rational(r), base, u});
        if (stop_at_first) return result;
      }
    }
  }
  return result;
}

absl::StatusOr<std::optional<PeakDeviation>> PeakDeviationSearch(
    std::span<const double> profile, Aggregator aggregator, double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    return absl::InvalidArgumentError("step must be in (0, 1]");
  }
  auto aggregate = [&](std::span<const double> values) {
    return aggregator == Aggregator::kMedian ? MedianOf(values)
                                             : MeanOf(values);
  };
  absl::StatusOr<double> truthful = aggregate(profile);
  if (!truthful.ok()) return truthful.status();
  const int steps = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> work(profile.begin(), profile.end());
  for (size_t i = 0; i < profile.size(); ++i) {
    const double peak = profile[i];
    const double base = ReviewerRegret(peak, *truthful);
    for (int k = 0; k <= steps; ++k) {
      work[i] = std::min(1.0, k * step);
      absl::StatusOr<double> dev = aggregate(work);
      if (!dev.ok()) return dev.status();
      if (ReviewerRegret(peak, *dev) < base) {
        return std::optional<PeakDeviation>(
            PeakDeviation{i, peak, work[i], *truthful, *dev});
      }
    }
    work[i] = peak;
  }
  return std::optional<PeakDeviation>();
}

absl::StatusOr<std::optional<BidDeviation>> GreedyBidDeviationSearch(
    std::span<const BundleBid> truthful, int num_tasks, int num_devices,
    std::span<const Rational> factors) {
  absl::StatusOr<AuctionOutcome> base =
      GreedyBaseline(truthful, num_tasks, num_devices);
  if (!base.ok()) return base.status();
  std::vector<BundleBid> work(truthful.begin(), truthful.end());
  for (size_t b = 0; b < work.size(); ++b) {
    const int d = work[b].device;
    const Rational value = truthful[b].bid;
    Rational u0 = DeviceUtility(base->payments[d], value,
                                base->allocation[d] != 0);
    for (const Rational& f : factors) {
      work[b].bid = value * f;
      absl::StatusOr<AuctionOutcome> dev =
          GreedyBaseline(work, num_tasks, num_devices);
      if (!dev.ok()) return dev.status();
      Rational u = DeviceUtility(dev->payments[d], value,
                                 dev->allocation[d] != 0);
      if (u > u0) {
        return std::optional<BidDeviation>(
            BidDeviation{d, value, work[b].bid, u0, u});
      }
    }
    work[b].bid = value;
  }
  return std::optional<BidDeviation>();
}

absl::StatusOr<ScalingProbeResult> WipdScalingProbe(
    std::span<const Valuation> valuations, DemandPolicy policy,
    const AuctionOptions& options, std::span<const Rational> factors) {
  ScalingProbeResult result;
  if (valuations.empty()) return result;
  const int m = valuations.front().num_tasks();
  AuctionOptions opts = options;
  if (opts.max_rounds <= 0) {
    std::vector<Valuation> widest(valuations.begin(), valuations.end());
    for (const Rational& f : factors) {
      for (const Valuation& v : valuations) widest.push_back(v.Scaled(f));
    }
    opts.max_rounds = std::max(1, DefaultMaxRounds(widest, opts.epsilon));
  }
  absl::StatusOr<AuctionOutcome> truthful = WipdRun(valuations, policy, opts);
  if (!truthful.ok()) {
    if (truthful.status().code() != absl::StatusCode::kResourceExhausted) {
      return truthful.status();
    }
    ++result.non_terminating;
    return result;
  }
  const Rational allowance = opts.epsilon * static_cast<int64_t>(m);
  for (size_t i = 0; i < valuations.size(); ++i) {
    const Valuation& v = valuations[i];
    TaskSet a0 = truthful->allocation[i];
    Rational u0 = DeviceUtility(truthful->payments[i], v(a0), a0 != 0);
    for (const Rational& f : factors) {
      std::vector<Valuation> reported(valuations.begin(), valuations.end());
      reported[i] = v.Scaled(f);
      absl::StatusOr<AuctionOutcome> dev = WipdRun(reported, policy, opts);
      ++result.probes;
      if (!dev.ok()) {
        if (dev.status().code() != absl::StatusCode::kResourceExhausted) {
          return dev.status();
        }
        ++result.non_terminating;
        continue;
      }
      TaskSet a = dev->allocation[i];
      Rational u = DeviceUtility(dev->payments[i], v(a), a != 0);
      if (u - u0 > allowance) {
        result.findings.push_back({static_cast<int>(i), f, u0, u});
      }
    }
  }
  return result;
}

}  // namespace crowdmech
