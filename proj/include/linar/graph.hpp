#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace linar {

/// Dense node label, 0..n-1 within one graph.
using NodeId = int;

using Edge = std::pair<NodeId, NodeId>;

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Undirected simple graph with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : adj_(n) {}

  std::size_t size() const { return adj_.size(); }
  bool empty() const { return adj_.empty(); }

  bool contains(NodeId v) const { return v >= 0 && static_cast<std::size_t>(v) < adj_.size(); }

  NodeId add_node() {
    adj_.emplace_back();
    return static_cast<NodeId>(adj_.size() - 1);
  }

  /// Inserts {a,b}. Returns false if the edge already existed.
  bool add_edge(NodeId a, NodeId b) {
    check(a);
    check(b);
    if (a == b) throw std::domain_error("self-loop on node " + std::to_string(a));
    auto& la = adj_[a];
    auto it = std::lower_bound(la.begin(), la.end(), b);
    if (it != la.end() && *it == b) return false;
    la.insert(it, b);
    auto& lb = adj_[b];
    lb.insert(std::lower_bound(lb.begin(), lb.end(), a), a);
    ++edges_;
    return true;
  }

  bool remove_edge(NodeId a, NodeId b) {
    check(a);
    check(b);
    auto& la = adj_[a];
    auto it = std::lower_bound(la.begin(), la.end(), b);
    if (it == la.end() || *it != b) return false;
    la.erase(it);
    auto& lb = adj_[b];
    lb.erase(std::lower_bound(lb.begin(), lb.end(), a));
    --edges_;
    return true;
  }

  bool has_edge(NodeId a, NodeId b) const {
    if (!contains(a) || !contains(b)) return false;
    const auto& la = adj_[a];
    return std::binary_search(la.begin(), la.end(), b);
  }

  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return adj_[v];
  }

  std::size_t degree(NodeId v) const {
    check(v);
    return adj_[v].size();
  }

  std::size_t edge_count() const { return edges_; }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& l : adj_) d = std::max(d, l.size());
    return d;
  }

  std::size_t min_degree() const {
    if (adj_.empty()) return 0;
    std::size_t d = adj_.front().size();
    for (const auto& l : adj_) d = std::min(d, l.size());
    return d;
  }

  bool is_complete() const {
    const std::size_t n = adj_.size();
    return n == 0 || edges_ == n * (n - 1) / 2;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_);
    for (NodeId v = 0; v < static_cast<NodeId>(adj_.size()); ++v)
      for (NodeId w : adj_[v])
        if (v < w) out.emplace_back(v, w);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  void check(NodeId v) const {
    if (!contains(v)) throw std::domain_error("unknown node id " + std::to_string(v));
  }

  std::vector<std::vector<NodeId>> adj_;
  std::size_t edges_ = 0;
};

/// A graph whose nodes are relabelled copies of nodes from a parent graph.
struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;  // sorted ascending

  std::optional<NodeId> local(NodeId parent) const {
    auto it = std::lower_bound(to_parent.begin(), to_parent.end(), parent);
    if (it == to_parent.end() || *it != parent) return std::nullopt;
    return static_cast<NodeId>(it - to_parent.begin());
  }

  NodeId local_or_throw(NodeId parent) const {
    auto l = local(parent);
    if (!l) throw std::domain_error("node " + std::to_string(parent) + " not in subgraph");
    return *l;
  }
};

/// Subgraph induced on `nodes` (any order, duplicates ignored).
inline Subgraph induced_subgraph(const Graph& g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Subgraph sub{Graph(nodes.size()), nodes};
  for (NodeId i = 0; i < static_cast<NodeId>(nodes.size()); ++i) {
    for (NodeId w : g.neighbors(nodes[i])) {
      if (w <= nodes[i]) continue;
      if (auto j = sub.local(w)) sub.graph.add_edge(i, *j);
    }
  }
  return sub;
}

/// G/v: the graph with `v` and its incident edges removed.
inline Subgraph remove_node(const Graph& g, NodeId v) {
  if (!g.contains(v)) throw std::domain_error("unknown node id " + std::to_string(v));
  std::vector<NodeId> keep;
  keep.reserve(g.size() - 1);
  for (NodeId u = 0; u < static_cast<NodeId>(g.size()); ++u)
    if (u != v) keep.push_back(u);
  return induced_subgraph(g, std::move(keep));
}

/// Hop distances from `src` (-1 when unreachable), truncated at `limit` hops.
inline std::vector<int> bfs_hops(const Graph& g, NodeId src, int limit = -1) {
  std::vector<int> dist(g.size(), -1);
  std::queue<NodeId> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    if (limit >= 0 && dist[u] >= limit) continue;
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Graph& g) {
  if (g.size() <= 1) return true;
  auto d = bfs_hops(g, 0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

/// Induced subgraph on {v} ∪ Γ(v) ∪ Γ(Γ(v)).
inline Subgraph local_subgraph_2hop(const Graph& g, NodeId v) {
  if (!g.contains(v)) throw std::domain_error("unknown node id " + std::to_string(v));
  auto d = bfs_hops(g, v, 2);
  std::vector<NodeId> ball;
  for (NodeId u = 0; u < static_cast<NodeId>(g.size()); ++u)
    if (d[u] >= 0) ball.push_back(u);
  return induced_subgraph(g, std::move(ball));
}

inline Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (NodeId a = 0; a < static_cast<NodeId>(n); ++a)
    for (NodeId b = a + 1; b < static_cast<NodeId>(n); ++b) g.add_edge(a, b);
  return g;
}

inline Graph cycle_graph(std::size_t n) {
  Graph g(n);
  for (NodeId a = 0; a < static_cast<NodeId>(n); ++a) g.add_edge(a, static_cast<NodeId>((a + 1) % n));
  return g;
}

inline Graph path_graph(std::size_t n) {
  Graph g(n);
  for (NodeId a = 0; a + 1 < static_cast<NodeId>(n); ++a) g.add_edge(a, a + 1);
  return g;
}

inline Graph from_edges(std::size_t n, std::initializer_list<Edge> edges) {
  Graph g(n);
  for (auto [a, b] : edges) g.add_edge(a, b);
  return g;
}

}  // namespace linar
