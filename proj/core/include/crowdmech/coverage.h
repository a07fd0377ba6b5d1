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

#ifndef CROWDMECH_COVERAGE_H_
#define CROWDMECH_COVERAGE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "crowdmech/graph.h"

namespace crowdmech {

// Incremental union of neighborhoods for one query session (one greedy run).
// Never shared between independent mechanism runs.
class CoveredSet {
 public:
  explicit CoveredSet(const SocialGraph& graph);

  // |Z_node \ covered|.
  int64_t Gain(NodeId node) const;
  // Adds Z_node to the covered set.
  void Add(NodeId node);
  bool IsCovered(NodeId node) const {
    return (bits_[node >> 6] >> (node & 63)) & 1U;
  }
  int64_t size() const { return size_; }
  std::vector<NodeId> Members() const;

 private:
  const SocialGraph* graph_;
  std::vector<uint64_t> bits_;
  int64_t size_ = 0;
};

// The notify function h(S) = |union of Z_i for i in S|. A selected node is
// counted only when some selected node is its neighbor.
class CoverageOracle {
 public:
  explicit CoverageOracle(const SocialGraph& graph) : graph_(&graph) {}

  const SocialGraph& graph() const { return *graph_; }

  absl::StatusOr<int64_t> Coverage(std::span<const NodeId> nodes) const;
  // h(S + {node}) - h(S); `node` must not be in `nodes`.
  absl::StatusOr<int64_t> Marginal(NodeId node,
                                   std::span<const NodeId> nodes) const;

  CoveredSet NewSession() const { return CoveredSet(*graph_); }

 private:
  const SocialGraph* graph_;
};

}  // namespace crowdmech

#endif  // CROWDMECH_COVERAGE_H_
