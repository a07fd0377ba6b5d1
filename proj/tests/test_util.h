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

#ifndef CROWDMECH_TESTS_TEST_UTIL_H_
#define CROWDMECH_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "crowdmech/graph.h"
#include "crowdmech/random.h"
#include "crowdmech/rational.h"
#include "crowdmech/tenm.h"

namespace crowdmech::testing {

std::string FixturePath(const std::string& name);

// The six-device worked example: dense ids 0..5 are devices 1..6.
SocialGraph Ex6Graph();
CostProfile Ex6Costs();

struct Tier1Instance {
  SocialGraph graph;
  CostProfile costs;
};

// G(n, p) with integer costs U[lo, hi] on every node.
Tier1Instance RandomTier1(Rng& rng, int n, double p, int64_t lo, int64_t hi);

// Marginals h(i | S) of every node, or -1 for members of S.
std::vector<int64_t> MarginalTable(const SocialGraph& graph,
                                   const std::vector<NodeId>& set);

// Copy of `graph` with `node` and its edges removed; original ids kept.
SocialGraph WithoutNode(const SocialGraph& graph, NodeId node);

}  // namespace crowdmech::testing

#endif  // CROWDMECH_TESTS_TEST_UTIL_H_
