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

#include "crowdmech/coverage.h"

#include <algorithm>
#include <bit>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace crowdmech {

CoveredSet::CoveredSet(const SocialGraph& graph)
    : graph_(&graph), bits_((graph.num_nodes() + 63) / 64, 0) {}

int64_t CoveredSet::Gain(NodeId node) const {
  int64_t gain = 0;
  for (NodeId nb : graph_->Neighbors(node)) gain += !IsCovered(nb);
  return gain;
}

void CoveredSet::Add(NodeId node) {
  for (NodeId nb : graph_->Neighbors(node)) {
    uint64_t& word = bits_[nb >> 6];
    const uint64_t mask = uint64_t{1} << (nb & 63);
    if (!(word & mask)) {
      word |= mask;
      ++size_;
    }
  }
}

std::vector<NodeId> CoveredSet::Members() const {
  std::vector<NodeId> out;
  out.reserve(size_);
  for (size_t w = 0; w < bits_.size(); ++w) {
    uint64_t word = bits_[w];
    while (word) {
      int bit = std::countr_zero(word);
      out.push_back(static_cast<NodeId>(w * 64 + bit));
      word &= word - 1;
    }
  }
  return out;
}

absl::StatusOr<int64_t> CoverageOracle::Coverage(
    std::span<const NodeId> nodes) const {
  CoveredSet covered(*graph_);
  for (NodeId node : nodes) {
    if (!graph_->Contains(node)) {
      return absl::OutOfRangeError(absl::StrCat("unknown node ", node));
    }
    covered.Add(node);
  }
  return covered.size();
}

absl::StatusOr<int64_t> CoverageOracle::Marginal(
    NodeId node, std::span<const NodeId> nodes) const {
  if (!graph_->Contains(node)) {
    return absl::OutOfRangeError(absl::StrCat("unknown node ", node));
  }
  if (std::find(nodes.begin(), nodes.end(), node) != nodes.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("node ", node, " is already in the set"));
  }
  CoveredSet covered(*graph_);
  for (NodeId other : nodes) {
    if (!graph_->Contains(other)) {
      return absl::OutOfRangeError(absl::StrCat("unknown node ", other));
    }
    covered.Add(other);
  }
  return covered.Gain(node);
}

}  // namespace crowdmech
