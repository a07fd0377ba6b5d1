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

#include "crowdmech/graph.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace crowdmech {

SocialGraph SocialGraph::FromDenseEdges(
    std::vector<int64_t> original_ids,
    std::span<const std::pair<NodeId, NodeId>> edges) {
  SocialGraph g;
  const int n = static_cast<int>(original_ids.size());
  g.original_ids_ = std::move(original_ids);

  std::vector<std::pair<NodeId, NodeId>> arcs;
  arcs.reserve(edges.size() * 2);
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  g.offsets_.assign(n + 1, 0);
  for (const auto& arc : arcs) ++g.offsets_[arc.first + 1];
  for (int i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.adjacency_.reserve(arcs.size());
  for (const auto& arc : arcs) g.adjacency_.push_back(arc.second);
  return g;
}

SocialGraph SocialGraph::WithNodes(
    int n, std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<int64_t> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  return FromDenseEdges(std::move(ids), edges);
}

bool SocialGraph::HasEdge(NodeId a, NodeId b) const {
  auto nb = Neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::optional<NodeId> SocialGraph::DenseId(int64_t original_id) const {
  auto it = std::lower_bound(original_ids_.begin(), original_ids_.end(),
                             original_id);
  if (it == original_ids_.end() || *it != original_id) return std::nullopt;
  return static_cast<NodeId>(it - original_ids_.begin());
}

absl::StatusOr<SocialGraph> ParseEdgeList(std::istream& in) {
  std::vector<std::pair<int64_t, int64_t>> raw;
  std::vector<int64_t> ids;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view(line);
    size_t first = view.find_first_not_of(" \t\r");
    if (first == absl::string_view::npos) continue;
    if (view[first] == '#') continue;
    std::vector<absl::string_view> fields =
        absl::StrSplit(view, absl::ByAnyChar(" \t\r"), absl::SkipEmpty());
    int64_t ends[2] = {0, 0};
    bool ok = fields.size() == 2;
    for (size_t k = 0; ok && k < 2; ++k) {
      auto [ptr, ec] = std::from_chars(
          fields[k].data(), fields[k].data() + fields[k].size(), ends[k]);
      ok = ec == std::errc() && ptr == fields[k].data() + fields[k].size() &&
           ends[k] >= 0;
    }
    if (!ok) {
      return absl::InvalidArgumentError(absl::StrCat(
          "edge list line ", line_no, ": expected two non-negative node ids, "
          "got '", line, "'"));
    }
    raw.emplace_back(ends[0], ends[1]);
    ids.push_back(ends[0]);
    ids.push_back(ends[1]);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  auto dense = [&ids](int64_t id) {
    return static_cast<NodeId>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.emplace_back(dense(u), dense(v));
  return SocialGraph::FromDenseEdges(std::move(ids), edges);
}

absl::StatusOr<SocialGraph> LoadEdgeListFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseEdgeList(in);
}

void WriteIdMapCsv(const SocialGraph& graph, std::ostream& out) {
  out << "original_id,dense_id\n";
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    out << graph.OriginalId(i) << ',' << i << '\n';
  }
}

SocialGraph RandomGraph(int n, double edge_prob, Rng& rng) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.Bernoulli(edge_prob)) edges.emplace_back(i, j);
    }
  }
  return SocialGraph::WithNodes(n, edges);
}

SocialGraph RandomGraphWithEdges(int n, int64_t edges, Rng& rng) {
  const int64_t max_edges = static_cast<int64_t>(n) * (n - 1) / 2;
  edges = std::min(edges, max_edges);
  std::unordered_set<uint64_t> seen;
  std::vector<std::pair<NodeId, NodeId>> list;
  list.reserve(edges);
  while (static_cast<int64_t>(list.size()) < edges) {
    NodeId a = static_cast<NodeId>(rng.UniformInt(0, n - 1));
    NodeId b = static_cast<NodeId>(rng.UniformInt(0, n - 1));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    uint64_t key = (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
    if (seen.insert(key).second) list.emplace_back(a, b);
  }
  return SocialGraph::WithNodes(n, list);
}

}  // namespace crowdmech
