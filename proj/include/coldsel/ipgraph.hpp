// Copyright 2026 the coldsel authors
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coldsel/core.hpp"

namespace coldsel {

enum class GraphMode { Exact, Approximate };

/// Directed inner-product proximity graph over item indices.
///
/// Exact graphs link every node to its k largest-inner-product items.
/// Approximate graphs come from incremental NSW-style insertion; their
/// out-degree is bounded by max_degree (2k) because of reverse edges.
struct ProximityGraph {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t max_degree = 0;
  Index entry_point = 0;
  GraphMode mode = GraphMode::Exact;
  std::vector<std::vector<Index>> adjacency;

  std::vector<std::size_t> in_degrees() const;
  std::size_t edge_count() const;

  /// Throws ValidationError on self-loops, degree overflow, or bad indices.
  void validate() const;

  friend bool operator==(const ProximityGraph&, const ProximityGraph&) = default;
};

struct SearchParams {
  std::size_t ef = 64;
  std::size_t k_out = 1;

  void validate() const;
};

struct ApproxBuildParams {
  std::size_t k = 10;
  std::size_t ef_construction = 200;
  /// Extra passes in which every node re-searches the finished graph and
  /// keeps the best max_degree of (found top-k) + (current edges).
  /// 0 is the plain single insertion pass.
  std::size_t refine_passes = 0;
  /// Insertion order is input order unless a shuffle seed is given.
  std::optional<std::uint64_t> shuffle_seed;
};

/// Index of the largest-norm item (smallest index on ties).
Index max_norm_index(const EmbeddingMatrix& items);

/// O(N^2) exact graph. Requires 1 <= k < N.
ProximityGraph build_exact_ip_graph(const EmbeddingMatrix& items, std::size_t k);

ProximityGraph build_approx_ip_graph(const EmbeddingMatrix& items, const ApproxBuildParams& params);

struct Neighbor {
  Index item;
  double value;
};

/// Best-first beam search by inner product. Keeps one visited buffer, so a
/// searcher must not be shared between threads.
class GraphSearcher {
 public:
  GraphSearcher(const ProximityGraph& graph, const EmbeddingMatrix& items);

  /// Up to `params.k_out` best nodes found, best first (ties by index).
  std::vector<Neighbor> search(std::span<const double> query, const SearchParams& params,
                               std::optional<Index> entry = std::nullopt);

 private:
  const ProximityGraph* graph_;
  const EmbeddingMatrix* items_;
  std::vector<std::uint32_t> visited_;
  std::uint32_t epoch_ = 0;
};

/// Single best node reached by beam search of width `ef` from the entry point.
Neighbor greedy_search_top1(const ProximityGraph& graph, const EmbeddingMatrix& items,
                            std::span<const double> query, std::size_t ef);

/// Items of largest in-degree.
SelectionResult select_max_in_degree(const EmbeddingMatrix& items, std::size_t m,
                                     const ProximityGraph& graph);

/// Each user's top-1 item (graph search, or a linear scan when exact_search)
/// casts one vote; items are ranked by vote count.
SelectionResult select_ipgs(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                            std::size_t m, const ProximityGraph& graph, std::size_t ef,
                            bool exact_search);

/// Per-user top-1 nominations used by select_ipgs.
std::vector<Index> ipgs_nominations(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                    const ProximityGraph& graph, std::size_t ef, bool exact_search);

/// Text dump: "coldsel-ipgraph 1", then "n k max_degree mode entry_point",
/// then one adjacency row per node ("degree j1 j2 ...").
void write_graph(std::ostream& out, const ProximityGraph& graph);
ProximityGraph read_graph(std::istream& in);
void save_graph(const std::string& path, const ProximityGraph& graph);
ProximityGraph load_graph(const std::string& path);

}  // namespace coldsel
