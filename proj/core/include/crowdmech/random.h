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

#ifndef CROWDMECH_RANDOM_H_
#define CROWDMECH_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace crowdmech {

// Derives an independent stream seed from a run seed and stream coordinates
// (round, batch, chunk, ...). Used so results never depend on how work is
// scheduled across threads.
uint64_t MixSeed(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

// Thin wrapper over mt19937_64 with distributions implemented here rather
// than taken from <random>, whose distribution algorithms are unspecified
// and differ between standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform01();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  // Uniform integer in [lo, hi] inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi);
  double Normal(double mean, double stddev);
  bool Bernoulli(double p) { return Uniform01() < p; }

  // Uniform sample of k distinct elements, in draw order.
  template <typename T>
  std::vector<T> Sample(std::span<const T> pool, size_t k) {
    std::vector<T> work(pool.begin(), pool.end());
    if (k > work.size()) k = work.size();
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + static_cast<size_t>(
                         UniformInt(0, static_cast<int64_t>(work.size() - i) - 1));
      std::swap(work[i], work[j]);
    }
    work.resize(k);
    return work;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crowdmech

#endif  // CROWDMECH_RANDOM_H_
