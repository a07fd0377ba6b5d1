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

#ifndef CROWDMECH_PROB_H_
#define CROWDMECH_PROB_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "crowdmech/graph.h"

namespace crowdmech {

// One notifier with `degree` neighbors, each notified independently with
// probability p.
struct NotifyModel {
  int64_t degree = 0;
  double p = 0.0;

  static absl::StatusOr<NotifyModel> Create(int64_t degree, double p);
};

double ExpectedNotified(const NotifyModel& model);

struct AtLeastOne {
  double exact = 0.0;  // 1 - (1 - p)^z
  double bound = 0.0;  // 1 - exp(-z p)
};

AtLeastOne AtLeastOneNotified(const NotifyModel& model);

// Chernoff upper bound on Pr{X > (1 + kappa) E}:
// exp((1 + kappa) E) / (1 + kappa)^((1 + kappa) E).
absl::StatusOr<double> ChernoffTail(double expectation, double kappa);

// exp(t) / t^t, the tail bound at threshold t.
absl::StatusOr<double> TailBoundAtThreshold(double t);

// Tail bound with t = sqrt(d) * ln(d); requires d > 2.
absl::StatusOr<double> DegreeTailBound(int64_t degree);
double DegreeTailThreshold(int64_t degree);

struct MonteCarloResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  int64_t trials = 0;
};

// Trials run in fixed chunks, each with its own counter-derived stream, so
// the result is the same for any worker count.
absl::StatusOr<MonteCarloResult> MonteCarloNotified(const SocialGraph& graph,
                                                    NodeId node, double p,
                                                    int64_t trials,
                                                    uint64_t seed,
                                                    int workers = 1);

// Same dynamics without a graph: Binomial(degree, p) samples.
absl::StatusOr<MonteCarloResult> MonteCarloBinomial(const NotifyModel& model,
                                                    int64_t trials,
                                                    uint64_t seed,
                                                    int workers = 1);

// Empirical Pr{X > threshold} for X ~ Binomial(degree, p).
absl::StatusOr<double> EmpiricalTail(const NotifyModel& model,
                                     double threshold, int64_t trials,
                                     uint64_t seed);

}  // namespace crowdmech

#endif  // CROWDMECH_PROB_H_
