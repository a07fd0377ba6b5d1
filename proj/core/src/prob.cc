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

#include "crowdmech/prob.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "crowdmech/random.h"

namespace crowdmech {
namespace {

constexpr int64_t kChunk = 1024;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// Runs `trial(rng)` `trials` times, chunk c using stream MixSeed(seed, c).
// Chunk sums are combined in chunk order.
template <typename Trial>
MonteCarloResult RunChunks(int64_t trials, uint64_t seed, int workers,
                           Trial trial) {
  const int64_t chunks = (trials + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  auto run_chunk = [&](int64_t c) {
    Rng rng(MixSeed(seed, static_cast<uint64_t>(c)));
    int64_t end = std::min(trials, (c + 1) * kChunk);
    Moments m;
    for (int64_t i = c * kChunk; i < end; ++i) {
      double x = trial(rng);
      m.sum += x;
      m.sum_sq += x * x;
    }
    parts[c] = m;
  };
  workers = static_cast<int>(std::clamp<int64_t>(workers, 1, chunks));
  if (workers == 1) {
    for (int64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
    for (std::thread& t : pool) t.join();
  }
  Moments total;
  for (const Moments& m : parts) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  MonteCarloResult out;
  out.trials = trials;
  double n = static_cast<double>(trials);
  out.mean = total.sum / n;
  double var = trials > 1
                   ? std::max(0.0, (total.sum_sq - n * out.mean * out.mean) /
                                       (n - 1.0))
                   : 0.0;
  out.stderr_ = std::sqrt(var / n);
  return out;
}

double Binomial(int64_t n, double p, Rng& rng) {
  int64_t hits = 0;
  for (int64_t i = 0; i < n; ++i) hits += rng.Bernoulli(p);
  return static_cast<double>(hits);
}

}  // namespace

absl::StatusOr<NotifyModel> NotifyModel::Create(int64_t degree, double p) {
  if (degree < 0) return absl::InvalidArgumentError("degree must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must be a probability in [0,1], got ", p));
  }
  return NotifyModel{degree, p};
}

double ExpectedNotified(const NotifyModel& model) {
  return static_cast<double>(model.degree) * model.p;
}

AtLeastOne AtLeastOneNotified(const NotifyModel& model) {
  double z = static_cast<double>(model.degree);
  AtLeastOne out;
  out.exact = 1.0 - std::pow(1.0 - model.p, z);
  out.bound = -std::expm1(-z * model.p);
  return out;
}

absl::StatusOr<double> ChernoffTail(double expectation, double kappa) {
  if (!(kappa > -1.0)) return absl::InvalidArgumentError("kappa must be > -1");
  if (!(expectation > 0.0)) {
    return absl::InvalidArgumentError("expectation must be > 0");
  }
  double a = (1.0 + kappa) * expectation;
  return std::exp(a - a * std::log1p(kappa));
}

absl::StatusOr<double> TailBoundAtThreshold(double t) {
  if (!(t > 0.0)) return absl::InvalidArgumentError("threshold must be > 0");
  return std::exp(t - t * std::log(t));
}

double DegreeTailThreshold(int64_t degree) {
  double d = static_cast<double>(degree);
  return std::sqrt(d) * std::log(d);
}

absl::StatusOr<double> DegreeTailBound(int64_t degree) {
  if (degree <= 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("degree must be > 2, got ", degree));
  }
  return TailBoundAtThreshold(DegreeTailThreshold(degree));
}

absl::StatusOr<MonteCarloResult> MonteCarloNotified(const SocialGraph& graph,
                                                    NodeId node, double p,
                                                    int64_t trials,
                                                    uint64_t seed,
                                                    int workers) {
  if (!graph.Contains(node)) {
    return absl::OutOfRangeError(absl::StrCat("unknown node ", node));
  }
  absl::StatusOr<NotifyModel> model = NotifyModel::Create(graph.Degree(node), p);
  if (!model.ok()) return model.status();
  return MonteCarloBinomial(*model, trials, seed, workers);
}

absl::StatusOr<MonteCarloResult> MonteCarloBinomial(const NotifyModel& model,
                                                    int64_t trials,
                                                    uint64_t seed,
                                                    int workers) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  return RunChunks(trials, seed, workers, [&](Rng& rng) {
    return Binomial(model.degree, model.p, rng);
  });
}

absl::StatusOr<double> EmpiricalTail(const NotifyModel& model,
                                     double threshold, int64_t trials,
                                     uint64_t seed) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  MonteCarloResult r = RunChunks(trials, seed, 1, [&](Rng& rng) {
    return Binomial(model.degree, model.p, rng) > threshold ? 1.0 : 0.0;
  });
  return r.mean;
}

}  // namespace crowdmech
