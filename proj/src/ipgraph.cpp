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

#include "coldsel/ipgraph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "coldsel/oracle.hpp"
#include "coldsel/parallel.hpp"

namespace coldsel {

namespace {

// a ranks ahead of b: larger value, then smaller index.
bool ahead(const Neighbor& a, const Neighbor& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.item < b.item;
}

struct Ahead {
  bool operator()(const Neighbor& a, const Neighbor& b) const { return ahead(b, a); }
};
struct Behind {
  bool operator()(const Neighbor& a, const Neighbor& b) const { return ahead(a, b); }
};

double ip(const EmbeddingMatrix& items, Index a, Index b) {
  return detail::dot(items.row_ptr(a), items.row_ptr(b), items.dim());
}

std::string_view mode_name(GraphMode mode) {
  return mode == GraphMode::Exact ? "exact" : "approximate";
}

}  // namespace

std::vector<std::size_t> ProximityGraph::in_degrees() const {
  std::vector<std::size_t> deg(n, 0);
  for (const auto& row : adjacency) {
    for (Index j : row) ++deg[j];
  }
  return deg;
}

std::size_t ProximityGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : adjacency) total += row.size();
  return total;
}

void ProximityGraph::validate() const {
  require(n >= 1, "graph: empty");
  require(adjacency.size() == n, "graph: adjacency row count differs from n");
  require(entry_point < n, "graph: entry point out of range");
  require(max_degree >= k, "graph: max_degree below k");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = adjacency[i];
    require(row.size() <= max_degree, "graph: node " + std::to_string(i) + " exceeds max degree");
    if (mode == GraphMode::Exact) {
      require(row.size() == k, "graph: exact node " + std::to_string(i) + " has out-degree != k");
    }
    std::vector<Index> sorted(row);
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "graph: duplicate edge at node " + std::to_string(i));
    for (Index j : row) {
      require(j < n, "graph: edge target out of range at node " + std::to_string(i));
      require(j != i, "graph: self-loop at node " + std::to_string(i));
    }
  }
}

void SearchParams::validate() const {
  require(k_out >= 1, "search: k_out must be >= 1");
  require(ef >= k_out, "search: ef must be >= k_out");
}

Index max_norm_index(const EmbeddingMatrix& items) {
  require(!items.empty(), "max_norm_index: no items");
  Index best = 0;
  double best_sq = ip(items, 0, 0);
  for (Index i = 1; i < items.count(); ++i) {
    const double sq = ip(items, i, i);
    if (sq > best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

ProximityGraph build_exact_ip_graph(const EmbeddingMatrix& items, std::size_t k) {
  const std::size_t n = items.count();
  if (k == 0 || k >= n) {
    throw ValidationError("build_exact_ip_graph: k=" + std::to_string(k) + " must be in [1, N-1] with N=" +
                          std::to_string(n));
  }
  ProximityGraph g;
  g.n = n;
  g.k = k;
  g.max_degree = k;
  g.mode = GraphMode::Exact;
  g.entry_point = max_norm_index(items);
  g.adjacency.assign(n, {});
  parallel_for(n, [&](std::size_t begin, std::size_t end, std::size_t) {
    std::vector<double> scores(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        scores[j] = j == i ? -std::numeric_limits<double>::infinity()
                           : ip(items, static_cast<Index>(i), static_cast<Index>(j));
      }
      // Self is the unique -inf entry and k < n, so it never makes the cut
      // unless every other score is also -inf, which finite inputs exclude.
      g.adjacency[i] = rank_descending(scores, k);
    }
  }, 8);
  return g;
}

GraphSearcher::GraphSearcher(const ProximityGraph& graph, const EmbeddingMatrix& items)
    : graph_(&graph), items_(&items), visited_(graph.n, 0) {
  require(graph.n == items.count(), "GraphSearcher: graph and item count differ");
}

std::vector<Neighbor> GraphSearcher::search(std::span<const double> query, const SearchParams& params,
                                            std::optional<Index> entry) {
  params.validate();
  require(query.size() == items_->dim(), "graph search: query dimension mismatch");
  require(graph_->n >= 1, "graph search: empty graph");
  // Nodes may be appended while a graph is being built.
  if (visited_.size() < graph_->adjacency.size()) visited_.resize(graph_->adjacency.size(), 0);
  if (++epoch_ == 0) {
    std::fill(visited_.begin(), visited_.end(), 0);
    epoch_ = 1;
  }
  const std::size_t dim = items_->dim();
  const Index start = entry.value_or(graph_->entry_point);
  auto score = [&](Index i) { return detail::dot(query.data(), items_->row_ptr(i), dim); };

  std::priority_queue<Neighbor, std::vector<Neighbor>, Ahead> frontier;  // best on top
  std::priority_queue<Neighbor, std::vector<Neighbor>, Behind> found;    // worst on top
  const Neighbor first{start, score(start)};
  visited_[start] = epoch_;
  frontier.push(first);
  found.push(first);
  while (!frontier.empty()) {
    const Neighbor current = frontier.top();
    frontier.pop();
    if (found.size() >= params.ef && ahead(found.top(), current)) break;
    for (Index next : graph_->adjacency[current.item]) {
      if (visited_[next] == epoch_) continue;
      visited_[next] = epoch_;
      const Neighbor cand{next, score(next)};
      if (found.size() < params.ef || ahead(cand, found.top())) {
        frontier.push(cand);
        found.push(cand);
        if (found.size() > params.ef) found.pop();
      }
    }
  }
  std::vector<Neighbor> out;
  out.reserve(found.size());
  while (!found.empty()) {
    out.push_back(found.top());
    found.pop();
  }
  std::reverse(out.begin(), out.end());
  if (out.size() > params.k_out) out.resize(params.k_out);
  return out;
}

Neighbor greedy_search_top1(const ProximityGraph& graph, const EmbeddingMatrix& items,
                            std::span<const double> query, std::size_t ef) {
  GraphSearcher searcher(graph, items);
  return searcher.search(query, {std::max<std::size_t>(ef, 1), 1}).front();
}

ProximityGraph build_approx_ip_graph(const EmbeddingMatrix& items, const ApproxBuildParams& params) {
  const std::size_t n = items.count();
  const std::size_t k = params.k;
  if (k == 0 || k >= n) {
    throw ValidationError("build_approx_ip_graph: k=" + std::to_string(k) +
                          " must be in [1, N-1] with N=" + std::to_string(n));
  }
  require(params.ef_construction >= 1, "build_approx_ip_graph: ef_construction must be >= 1");
  const SearchParams search{std::max(params.ef_construction, k), k};

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  if (params.shuffle_seed) {
    std::mt19937_64 rng(*params.shuffle_seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  ProximityGraph g;
  g.n = n;
  g.k = k;
  g.max_degree = 2 * k;
  g.mode = GraphMode::Approximate;
  g.adjacency.assign(n, {});
  GraphSearcher searcher(g, items);

  // Reverse edge c -> v: append while under budget, otherwise replace c's
  // weakest edge if v beats it.
  auto link_back = [&](Index c, Index v) {
    auto& row = g.adjacency[c];
    if (row.size() < g.max_degree) {
      row.push_back(v);
      return;
    }
    std::size_t weakest = 0;
    Neighbor weak{row[0], ip(items, c, row[0])};
    for (std::size_t p = 1; p < row.size(); ++p) {
      const Neighbor e{row[p], ip(items, c, row[p])};
      if (ahead(weak, e)) {
        weak = e;
        weakest = p;
      }
    }
    if (ahead({v, ip(items, c, v)}, weak)) row[weakest] = v;
  };

  Index entry = order[0];
  double entry_sq = ip(items, entry, entry);
  for (std::size_t pos = 1; pos < n; ++pos) {
    const Index v = order[pos];
    const auto near = searcher.search(items.row(v), search, entry);
    for (const auto& nb : near) g.adjacency[v].push_back(nb.item);
    for (const auto& nb : near) link_back(nb.item, v);
    const double sq = ip(items, v, v);
    if (sq > entry_sq || (sq == entry_sq && v < entry)) {
      entry = v;
      entry_sq = sq;
    }
  }

  for (std::size_t pass = 0; pass < params.refine_passes; ++pass) {
    const SearchParams wider{search.ef + 1, k + 1};
    for (Index v : order) {
      auto near = searcher.search(items.row(v), wider, entry);
      std::vector<Neighbor> pool;
      for (const auto& nb : near) {
        if (nb.item != v) pool.push_back(nb);
      }
      if (pool.size() > k) pool.resize(k);
      for (Index e : g.adjacency[v]) {
        if (std::none_of(pool.begin(), pool.end(), [&](const Neighbor& p) { return p.item == e; })) {
          pool.push_back({e, ip(items, v, e)});
        }
      }
      std::sort(pool.begin(), pool.end(), ahead);
      if (pool.size() > g.max_degree) pool.resize(g.max_degree);
      auto& row = g.adjacency[v];
      row.clear();
      for (const auto& p : pool) row.push_back(p.item);
    }
  }

  g.entry_point = max_norm_index(items);
  return g;
}

SelectionResult select_max_in_degree(const EmbeddingMatrix& items, std::size_t m,
                                     const ProximityGraph& graph) {
  require(graph.n == items.count(), "select_max_in_degree: graph does not match items");
  require(m >= 1 && m <= items.count(), "select_max_in_degree: m must be in [1, N]");
  const auto deg = graph.in_degrees();
  std::vector<double> scores(deg.begin(), deg.end());
  SelectionResult out;
  out.method = Method::MaxInDegree;
  out.ranked = rank_descending(scores, m);
  for (Index i : out.ranked) out.scores.push_back(scores[i]);
  return out;
}

std::vector<Index> ipgs_nominations(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                                    const ProximityGraph& graph, std::size_t ef, bool exact_search) {
  require(!users.empty(), "ipgs: no users");
  require(users.dim() == items.dim(), "ipgs: dimension mismatch");
  require(graph.n == items.count(), "ipgs: graph does not match items");
  std::vector<Index> nominee(users.count());
  parallel_for(users.count(), [&](std::size_t begin, std::size_t end, std::size_t) {
    GraphSearcher searcher(graph, items);
    const SearchParams params{std::max<std::size_t>(ef, 1), 1};
    for (std::size_t w = begin; w < end; ++w) {
      nominee[w] = exact_search ? oracle::exact_top_k(users.row(w), items, 1).items.front()
                                : searcher.search(users.row(w), params).front().item;
    }
  }, 16);
  return nominee;
}

SelectionResult select_ipgs(const EmbeddingMatrix& users, const EmbeddingMatrix& items,
                            std::size_t m, const ProximityGraph& graph, std::size_t ef,
                            bool exact_search) {
  require(m >= 1 && m <= items.count(), "select_ipgs: m must be in [1, N]");
  const auto nominee = ipgs_nominations(users, items, graph, ef, exact_search);
  std::vector<double> freq(items.count(), 0.0);
  for (Index i : nominee) freq[i] += 1.0;
  SelectionResult out;
  out.method = Method::Ipgs;
  out.ranked = rank_descending(freq, m);
  for (Index i : out.ranked) out.scores.push_back(freq[i]);
  return out;
}

void write_graph(std::ostream& out, const ProximityGraph& graph) {
  out << "coldsel-ipgraph 1\n";
  out << graph.n << ' ' << graph.k << ' ' << graph.max_degree << ' ' << mode_name(graph.mode) << ' '
      << graph.entry_point << '\n';
  for (const auto& row : graph.adjacency) {
    out << row.size();
    for (Index j : row) out << ' ' << j;
    out << '\n';
  }
}

ProximityGraph read_graph(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "coldsel-ipgraph") {
    throw ValidationError("graph file: missing 'coldsel-ipgraph' header");
  }
  if (version != 1) throw ValidationError("graph file: unsupported version " + std::to_string(version));
  ProximityGraph g;
  std::string mode;
  if (!(in >> g.n >> g.k >> g.max_degree >> mode >> g.entry_point)) {
    throw ValidationError("graph file: malformed header line");
  }
  if (mode == "exact") {
    g.mode = GraphMode::Exact;
  } else if (mode == "approximate") {
    g.mode = GraphMode::Approximate;
  } else {
    throw ValidationError("graph file: unknown mode '" + mode + "'");
  }
  g.adjacency.resize(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    std::size_t deg = 0;
    if (!(in >> deg)) throw ValidationError("graph file: truncated at row " + std::to_string(i));
    g.adjacency[i].resize(deg);
    for (auto& j : g.adjacency[i]) {
      if (!(in >> j)) throw ValidationError("graph file: truncated at row " + std::to_string(i));
    }
  }
  g.validate();
  return g;
}

void save_graph(const std::string& path, const ProximityGraph& graph) {
  std::ofstream out(path);
  if (!out) throw RuntimeError("cannot open '" + path + "' for writing");
  write_graph(out, graph);
  if (!out) throw RuntimeError("write failed for '" + path + "'");
}

ProximityGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open '" + path + "'");
  return read_graph(in);
}

}  // namespace coldsel
