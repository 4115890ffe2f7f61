#pragma once

#include <climits>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "linar/graph.hpp"

namespace linar {

/// Unit-capacity max-flow on the node-split digraph of an undirected graph.
///
/// Every node v becomes in(v) -> out(v) with capacity 1, every edge {u,w}
/// becomes out(u) -> in(w) and out(w) -> in(u). The maximum out(x) -> in(y)
/// flow is the number of internally vertex-disjoint x-y paths. A direct x-y
/// edge is excluded from the network and counted as one extra path.
///
/// One instance is reused across many queries on the same graph.
class SplitFlow {
 public:
  explicit SplitFlow(const Graph& g) : g_(&g), n_(static_cast<int>(g.size())) {
    const int verts = 2 * n_;
    std::vector<int> count(verts + 1, 0);
    // in->out arcs and their reverses
    for (int v = 0; v < n_; ++v) {
      ++count[in(v)];
      ++count[out(v)];
    }
    for (auto [a, b] : g.edges()) {
      count[out(a)] += 1;
      count[in(b)] += 1;
      count[out(b)] += 1;
      count[in(a)] += 1;
    }
    start_.assign(verts + 1, 0);
    for (int v = 0; v < verts; ++v) start_[v + 1] = start_[v] + count[v];
    const int arcs = start_[verts];
    to_.assign(arcs, 0);
    rev_.assign(arcs, 0);
    cap0_.assign(arcs, 0);
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    auto add = [&](int a, int b, std::int8_t cap) {
      int i = fill[a]++, j = fill[b]++;
      to_[i] = b;
      rev_[i] = j;
      cap0_[i] = cap;
      to_[j] = a;
      rev_[j] = i;
      cap0_[j] = 0;
    };
    // Edge arcs get slack capacity so every minimum cut runs through
    // in->out arcs and reads off as a vertex separator.
    for (int v = 0; v < n_; ++v) add(in(v), out(v), 1);
    for (auto [a, b] : g.edges()) {
      add(out(a), in(b), 2);
      add(out(b), in(a), 2);
    }
    cap_ = cap0_;
    parent_.assign(verts, -1);
    seen_.assign(verts, 0);
  }

  const Graph& graph() const { return *g_; }

  /// Number of internally disjoint x-y paths, stopping early once `cap` is reached.
  int max_paths(NodeId x, NodeId y, int cap = INT_MAX) {
    if (!g_->contains(x) || !g_->contains(y))
      throw std::domain_error("disjoint_paths: unknown node id");
    if (x == y) throw std::domain_error("disjoint_paths: endpoints must differ");
    cap_ = cap0_;
    x_ = x;
    y_ = y;
    reach_valid_ = false;
    direct_ = g_->has_edge(x, y) ? 1 : 0;
    if (direct_) {
      block_arc(out(x), in(y));
      block_arc(out(y), in(x));
    }
    flow_ = 0;
    while (direct_ + flow_ < cap && augment()) ++flow_;
    exhausted_ = direct_ + flow_ < cap;
    return direct_ + flow_;
  }

  /// Internal nodes of each path found by the last query, excluding the direct edge.
  std::vector<std::vector<NodeId>> paths() const {
    std::vector<std::vector<NodeId>> out_paths;
    std::vector<int> used(to_.size(), 0);
    for (int p = 0; p < flow_; ++p) {
      std::vector<NodeId> nodes;
      int at = out(x_);
      while (at != in(y_)) {
        int next = -1;
        for (int i = start_[at]; i < start_[at + 1]; ++i) {
          if (cap_[i] < cap0_[i] && !used[i] && !(at == out(x_) && to_[i] == in(y_))) {
            used[i] = 1;
            next = to_[i];
            break;
          }
        }
        if (next < 0) break;
        at = next;
        if (at != in(y_) && (at & 1) == 0) nodes.push_back(at / 2);
      }
      out_paths.push_back(std::move(nodes));
    }
    return out_paths;
  }

  /// Minimum x-y vertex separator. Only meaningful for non-adjacent x,y when
  /// the last query ran to completion (result below its cap).
  std::vector<NodeId> min_cut() {
    compute_reach();
    std::vector<NodeId> cut;
    for (int v = 0; v < n_; ++v) {
      if (v == x_ || v == y_) continue;
      if (reach_s_[in(v)] && !reach_s_[out(v)]) cut.push_back(v);
    }
    return cut;
  }

  /// True when adding the undirected edge {a,b} would raise the last
  /// (uncapped) query's path count by one.
  bool improves_with(NodeId a, NodeId b) {
    if ((a == x_ && b == y_) || (a == y_ && b == x_)) return true;
    compute_reach();
    return (reach_s_[out(a)] && reach_t_[in(b)]) || (reach_s_[out(b)] && reach_t_[in(a)]);
  }

  bool last_run_exhausted() const { return exhausted_; }

 private:
  static int in(int v) { return 2 * v; }
  static int out(int v) { return 2 * v + 1; }

  void block_arc(int a, int b) {
    for (int i = start_[a]; i < start_[a + 1]; ++i)
      if (to_[i] == b && cap0_[i] > 0) cap_[i] = 0;
  }

  bool augment() {
    const int s = out(x_), t = in(y_);
    ++stamp_;
    if (stamp_ == 0) {
      std::fill(seen_.begin(), seen_.end(), 0);
      stamp_ = 1;
    }
    queue_.clear();
    queue_.push_back(s);
    seen_[s] = stamp_;
    std::size_t head = 0;
    while (head < queue_.size()) {
      int u = queue_[head++];
      for (int i = start_[u]; i < start_[u + 1]; ++i) {
        if (cap_[i] <= 0) continue;
        int w = to_[i];
        if (seen_[w] == stamp_) continue;
        seen_[w] = stamp_;
        parent_[w] = i;
        if (w == t) {
          for (int at = t; at != s;) {
            int arc = parent_[at];
            --cap_[arc];
            ++cap_[rev_[arc]];
            at = to_[rev_[arc]];
          }
          return true;
        }
        queue_.push_back(w);
      }
    }
    return false;
  }

  void compute_reach() {
    if (reach_valid_) return;
    const int verts = 2 * n_;
    reach_s_.assign(verts, 0);
    reach_t_.assign(verts, 0);
    std::vector<int> q;
    q.push_back(out(x_));
    reach_s_[out(x_)] = 1;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      for (int i = start_[u]; i < start_[u + 1]; ++i)
        if (cap_[i] > 0 && !reach_s_[to_[i]]) {
          reach_s_[to_[i]] = 1;
          q.push_back(to_[i]);
        }
    }
    // vertices that can still reach in(y): walk reverse residual arcs
    q.clear();
    q.push_back(in(y_));
    reach_t_[in(y_)] = 1;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      for (int i = start_[u]; i < start_[u + 1]; ++i) {
        int w = to_[i];
        if (cap_[rev_[i]] > 0 && !reach_t_[w]) {
          reach_t_[w] = 1;
          q.push_back(w);
        }
      }
    }
    reach_valid_ = true;
  }

  const Graph* g_;
  int n_;
  std::vector<int> start_, to_, rev_;
  std::vector<std::int8_t> cap0_, cap_;
  std::vector<int> parent_;
  std::vector<unsigned> seen_;
  unsigned stamp_ = 0;
  std::vector<int> queue_;
  std::vector<char> reach_s_, reach_t_;
  bool reach_valid_ = false;
  bool exhausted_ = false;
  NodeId x_ = 0, y_ = 0;
  int direct_ = 0, flow_ = 0;
};

/// Maximum number of internally vertex-disjoint x-y paths (Menger value).
inline int disjoint_paths(const Graph& g, NodeId x, NodeId y) {
  SplitFlow f(g);
  return f.max_paths(x, y);
}

struct ConnectivityReport {
  int kappa = 0;
  std::vector<NodeId> witness_cut;
};

/// Global vertex connectivity with a minimum separator as witness.
///
/// Pivot on a minimum-degree node s: any minimum separator either misses s,
/// and then splits s from some non-neighbour, or contains s, and then splits
/// two non-adjacent neighbours of s.
inline ConnectivityReport vertex_connectivity(const Graph& g) {
  if (g.empty()) throw std::domain_error("vertex_connectivity: empty graph");
  const int n = static_cast<int>(g.size());
  if (g.is_complete()) return {n - 1, {}};

  NodeId s = 0;
  for (NodeId v = 1; v < n; ++v)
    if (g.degree(v) < g.degree(s)) s = v;

  ConnectivityReport best;
  best.kappa = static_cast<int>(g.degree(s));
  best.witness_cut.assign(g.neighbors(s).begin(), g.neighbors(s).end());
  if (best.kappa == 0) return best;

  SplitFlow flow(g);
  auto probe = [&](NodeId a, NodeId b) {
    int f = flow.max_paths(a, b, best.kappa);
    if (f < best.kappa) {
      best.kappa = f;
      best.witness_cut = flow.min_cut();
    }
    return best.kappa == 0;
  };

  for (NodeId y = 0; y < n; ++y) {
    if (y == s || g.has_edge(s, y)) continue;
    if (probe(s, y)) return best;
  }
  auto nb = g.neighbors(s);
  for (std::size_t i = 0; i < nb.size(); ++i)
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      if (g.has_edge(nb[i], nb[j])) continue;
      if (probe(nb[i], nb[j])) return best;
    }
  return best;
}

/// True when the graph has more than k nodes and vertex connectivity >= k.
inline bool is_k_connected(const Graph& g, int k) {
  if (static_cast<int>(g.size()) <= k) return false;
  if (k <= 0) return true;
  if (static_cast<int>(g.min_degree()) < k) return false;
  return vertex_connectivity(g).kappa >= k;
}

/// Ground-truth label: removing v does not lower the vertex connectivity.
inline bool is_trusted_oracle(const Graph& g, NodeId v) {
  if (!g.contains(v)) throw std::domain_error("is_trusted_oracle: unknown node id " + std::to_string(v));
  if (g.size() < 3) throw std::domain_error("is_trusted_oracle: need at least 3 nodes");
  const int before = vertex_connectivity(g).kappa;
  const int after = vertex_connectivity(remove_node(g, v).graph).kappa;
  return after >= before;
}

/// Sum of disjoint-path counts over all unordered pairs of `nodes`.
inline long pair_path_sum(const Graph& g, const std::vector<NodeId>& nodes) {
  SplitFlow flow(g);
  long sum = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j) sum += flow.max_paths(nodes[i], nodes[j]);
  return sum;
}

}  // namespace linar
