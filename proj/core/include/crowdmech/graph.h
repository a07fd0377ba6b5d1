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

#ifndef CROWDMECH_GRAPH_H_
#define CROWDMECH_GRAPH_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "crowdmech/random.h"

namespace crowdmech {

// Dense node index, 0..num_nodes()-1. The id that appeared in the input file
// is kept separately (OriginalId) and is what reports print.
using NodeId = int32_t;

// Undirected, simple social graph in CSR form. Immutable once built, so a
// single instance may be shared by concurrent readers.
//
// Invariants: symmetric adjacency, no self-loops, no duplicate edges,
// neighbor lists sorted ascending.
class SocialGraph {
 public:
  SocialGraph() = default;

  // Builds a graph over `original_ids.size()` nodes. `original_ids` must be
  // strictly increasing; edges use dense indices. Self-loops and duplicates
  // are dropped.
  static SocialGraph FromDenseEdges(
      std::vector<int64_t> original_ids,
      std::span<const std::pair<NodeId, NodeId>> edges);

  // Nodes 0..n-1 with original id == dense id.
  static SocialGraph WithNodes(
      int n, std::span<const std::pair<NodeId, NodeId>> edges);

  int num_nodes() const { return static_cast<int>(original_ids_.size()); }
  int64_t num_edges() const {
    return static_cast<int64_t>(adjacency_.size()) / 2;
  }
  bool Contains(NodeId node) const {
    return node >= 0 && node < num_nodes();
  }

  std::span<const NodeId> Neighbors(NodeId node) const {
    return {adjacency_.data() + offsets_[node],
            adjacency_.data() + offsets_[node + 1]};
  }
  int Degree(NodeId node) const {
    return static_cast<int>(offsets_[node + 1] - offsets_[node]);
  }
  bool HasEdge(NodeId a, NodeId b) const;

  int64_t OriginalId(NodeId node) const { return original_ids_[node]; }
  std::optional<NodeId> DenseId(int64_t original_id) const;
  const std::vector<int64_t>& original_ids() const { return original_ids_; }

 private:
  std::vector<int64_t> original_ids_;
  std::vector<int64_t> offsets_{0};
  std::vector<NodeId> adjacency_;
};

// Parses a whitespace-delimited "u v" edge list. Lines starting with '#' and
// blank lines are skipped. Node ids are re-indexed densely in ascending order
// of their original value. Empty input yields an empty graph.
absl::StatusOr<SocialGraph> ParseEdgeList(std::istream& in);
absl::StatusOr<SocialGraph> LoadEdgeListFile(const std::string& path);

// "original_id,dense_id" rows with a header line.
void WriteIdMapCsv(const SocialGraph& graph, std::ostream& out);

// Erdos-Renyi G(n, p).
SocialGraph RandomGraph(int n, double edge_prob, Rng& rng);
// Uniform simple graph with exactly `edges` edges (G(n, m)).
SocialGraph RandomGraphWithEdges(int n, int64_t edges, Rng& rng);

}  // namespace crowdmech

#endif  // CROWDMECH_GRAPH_H_
