#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "linar/connectivity.hpp"
#include "linar/coverage.hpp"
#include "linar/graph.hpp"

namespace linar {

enum class NodeStatus { Joint, Trusted };

inline const char* to_string(NodeStatus s) { return s == NodeStatus::Trusted ? "Trusted" : "Joint"; }

/// Non-edges between 2-hop (not 1-hop) members of v's local graph whose
/// endpoints have fewer than k disjoint paths there. Sorted.
inline std::vector<Edge> candidate_imaginary_edges(const Graph& gv, NodeId v, int k) {
  std::vector<NodeId> outer;
  for (NodeId u = 0; u < static_cast<NodeId>(gv.size()); ++u)
    if (u != v && !gv.has_edge(u, v)) outer.push_back(u);
  std::vector<Edge> out;
  SplitFlow flow(gv);
  for (std::size_t i = 0; i < outer.size(); ++i)
    for (std::size_t j = i + 1; j < outer.size(); ++j) {
      if (gv.has_edge(outer[i], outer[j])) continue;
      if (flow.max_paths(outer[i], outer[j], k) < k) out.emplace_back(outer[i], outer[j]);
    }
  return out;
}

/// Sum of disjoint-path counts over all pairs of v's neighbours in g.
inline long neighbor_path_sum(const Graph& g, NodeId v) {
  std::vector<NodeId> nb(g.neighbors(v).begin(), g.neighbors(v).end());
  return pair_path_sum(g, nb);
}

struct ImaginaryAugmentation {
  std::vector<Edge> candidates;  // pairs eligible for an imaginary edge
  std::vector<Edge> chosen;      // S_v, sorted
  Graph augmented;               // local graph plus chosen edges (valid when success)
  long path_sum = 0;             // neighbour path sum in `augmented`
  long base_path_sum = 0;        // the same sum without imaginary edges
  bool success = false;
  bool exhaustive = false;  // optimum proven (search finished within budget)

  /// Imaginary edges add no path between any two of v's neighbours, so every
  /// neighbour-pair count in `augmented` is a real one.
  bool path_neutral() const { return success && path_sum == base_path_sum; }
};

struct AugmentOptions {
  /// Branch-and-bound nodes before settling for the best set found so far.
  long node_limit = 400;
};

namespace detail {

inline Graph with_edges(const Graph& g, const std::vector<Edge>& cands, const std::vector<int>& pick) {
  Graph h = g;
  for (int i : pick) h.add_edge(cands[i].first, cands[i].second);
  return h;
}

/// Connected-component label of every node after removing `cut`.
inline std::vector<int> components_without(const Graph& g, const std::vector<NodeId>& cut) {
  std::vector<int> comp(g.size(), -1);
  for (NodeId c : cut) comp[c] = -2;
  int label = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < static_cast<NodeId>(g.size()); ++s) {
    if (comp[s] != -1) continue;
    comp[s] = label;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : g.neighbors(u))
        if (comp[w] == -1) {
          comp[w] = label;
          stack.push_back(w);
        }
    }
    ++label;
  }
  return comp;
}

/// Candidates (not yet picked) that join two different sides of a minimum
/// separator of h. Every augmentation reaching kappa >= k must contain one.
inline std::vector<int> crossing_candidates(const Graph& h, const std::vector<Edge>& cands,
                                            const std::vector<char>& picked, const ConnectivityReport& rep) {
  std::vector<int> out;
  if (h.is_complete()) return out;
  auto comp = components_without(h, rep.witness_cut);
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    if (picked[i]) continue;
    int a = comp[cands[i].first], b = comp[cands[i].second];
    if (a >= 0 && b >= 0 && a != b) out.push_back(i);
  }
  return out;
}

inline int degree_deficit(const Graph& h, int k) {
  int d = 0;
  for (NodeId u = 0; u < static_cast<NodeId>(h.size()); ++u) d += std::max(0, k - static_cast<int>(h.degree(u)));
  return d;
}

inline std::vector<Edge> sorted_edges(const std::vector<Edge>& cands, std::vector<int> pick) {
  std::vector<Edge> e;
  for (int i : pick) e.push_back(cands[i]);
  std::sort(e.begin(), e.end());
  return e;
}

/// Exact optimum by branch and bound: smallest neighbour path sum first,
/// then fewest edges, then the lexicographically smallest edge list. Branches
/// only on separator-crossing candidates; every inclusion-minimal solution is
/// still reachable and the path sum never drops when edges are added, so the
/// bound is safe. Returns false in `complete` when the node budget ran out.
inline bool exact_augmentation(const Graph& gv, NodeId v, int k, const std::vector<Edge>& cands,
                               std::vector<Edge>& best_edges, long node_limit, bool& complete);

/// Greedy fallback for large candidate sets: repeatedly add a candidate that
/// crosses the current minimum separator, preferring the one that raises the
/// neighbour path sum least, then the one that relieves most degree deficit.
/// Redundant edges are pruned afterwards in reverse insertion order.
inline bool greedy_augmentation(const Graph& gv, NodeId v, int k, const std::vector<Edge>& cands,
                                std::vector<Edge>& out_edges) {
  const int m = static_cast<int>(cands.size());
  std::vector<char> picked(m, 0);
  std::vector<int> order;
  Graph h = gv;
  std::vector<NodeId> nb(gv.neighbors(v).begin(), gv.neighbors(v).end());
  while (true) {
    auto rep = vertex_connectivity(h);
    if (rep.kappa >= k) break;
    auto cross = crossing_candidates(h, cands, picked, rep);
    if (cross.empty()) return false;
    std::vector<int> increase(cands.size(), 0);
    SplitFlow flow(h);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        flow.max_paths(nb[i], nb[j]);
        for (int c : cross)
          if (flow.improves_with(cands[c].first, cands[c].second)) ++increase[c];
      }
    int best = -1;
    std::tuple<int, int, Edge> best_key;
    for (int c : cross) {
      int relief = (static_cast<int>(h.degree(cands[c].first)) < k) + (static_cast<int>(h.degree(cands[c].second)) < k);
      auto key = std::make_tuple(increase[c], -relief, cands[c]);
      if (best < 0 || key < best_key) {
        best = c;
        best_key = key;
      }
    }
    picked[best] = 1;
    order.push_back(best);
    h.add_edge(cands[best].first, cands[best].second);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    h.remove_edge(cands[*it].first, cands[*it].second);
    if (is_k_connected(h, k))
      picked[*it] = 0;
    else
      h.add_edge(cands[*it].first, cands[*it].second);
  }
  std::vector<int> keep;
  for (int c : order)
    if (picked[c]) keep.push_back(c);
  out_edges = sorted_edges(cands, keep);
  return true;
}

inline bool exact_augmentation(const Graph& gv, NodeId v, int k, const std::vector<Edge>& cands,
                               std::vector<Edge>& best_edges, long node_limit, bool& complete) {
  const int m = static_cast<int>(cands.size());
  complete = true;
  bool have = greedy_augmentation(gv, v, k, cands, best_edges);
  long best_sum = 0;
  if (have) {
    Graph h = gv;
    for (auto [a, b] : best_edges) h.add_edge(a, b);
    best_sum = neighbor_path_sum(h, v);
  }
  const std::vector<NodeId> nb(gv.neighbors(v).begin(), gv.neighbors(v).end());
  std::set<std::vector<int>> visited;
  std::vector<int> pick;
  std::vector<char> picked(m, 0);
  long nodes = 0;
  // worse than the incumbent even before adding anything more
  auto dominated = [&](long sum, std::size_t size) {
    return have && (sum > best_sum || (sum == best_sum && size > best_edges.size()));
  };
  const long base_sum = neighbor_path_sum(gv, v);
  auto dfs = [&](auto&& self, const Graph& h, long sum) -> void {
    // a path-neutral single edge cannot be beaten
    if (have && best_sum == base_sum && best_edges.size() <= 1) return;
    if (++nodes > node_limit) {
      complete = false;
      return;
    }
    const std::size_t size = pick.size();
    auto rep = vertex_connectivity(h);
    if (rep.kappa >= k) {
      auto edges = sorted_edges(cands, pick);
      if (!have || sum < best_sum || (sum == best_sum && (size < best_edges.size() ||
                                                           (size == best_edges.size() && edges < best_edges)))) {
        have = true;
        best_sum = sum;
        best_edges = std::move(edges);
      }
      return;
    }
    auto cross = crossing_candidates(h, cands, picked, rep);
    std::vector<long> child_sum(cross.size(), sum);
    SplitFlow flow(h);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        flow.max_paths(nb[i], nb[j]);
        for (std::size_t c = 0; c < cross.size(); ++c)
          if (flow.improves_with(cands[cross[c]].first, cands[cross[c]].second)) ++child_sum[c];
      }
    std::vector<std::size_t> order(cross.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return child_sum[a] < child_sum[b]; });
    for (std::size_t idx : order) {
      if (!complete) return;
      const int c = cross[idx];
      if (dominated(child_sum[idx], size + 1)) continue;
      std::vector<int> next = pick;
      next.push_back(c);
      std::sort(next.begin(), next.end());
      if (!visited.insert(next).second) continue;
      Graph h2 = h;
      h2.add_edge(cands[c].first, cands[c].second);
      pick.push_back(c);
      picked[c] = 1;
      self(self, h2, child_sum[idx]);
      picked[c] = 0;
      pick.pop_back();
    }
  };
  dfs(dfs, gv, base_sum);
  return have;
}

}  // namespace detail

/// Builds the augmented local graph: the local graph plus the imaginary edges that make it
/// k-connected while adding as few paths as possible between v's neighbours
/// (fewest edges among equals). Failure is reported, not thrown.
inline ImaginaryAugmentation build_imaginary_kconnected(const Graph& gv, NodeId v, int k, AugmentOptions opts = {}) {
  ImaginaryAugmentation out;
  out.candidates = candidate_imaginary_edges(gv, v, k);
  out.base_path_sum = neighbor_path_sum(gv, v);
  if (static_cast<int>(gv.size()) <= k) return out;
  if (is_k_connected(gv, k)) {
    out.success = true;
    out.exhaustive = true;
    out.augmented = gv;
    out.path_sum = neighbor_path_sum(gv, v);
    return out;
  }
  std::vector<int> all(out.candidates.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  if (!is_k_connected(detail::with_edges(gv, out.candidates, all), k)) return out;

  out.success = detail::exact_augmentation(gv, v, k, out.candidates, out.chosen, opts.node_limit, out.exhaustive);
  if (out.success) {
    out.augmented = gv;
    for (auto [a, b] : out.chosen) out.augmented.add_edge(a, b);
    out.path_sum = neighbor_path_sum(out.augmented, v);
  }
  return out;
}

/// What a node knows after the Start/Ngb exchange: its own neighbours and
/// each neighbour's neighbour list. Edges between two 2-hop nodes are unknown.
struct LocalView {
  NodeId me = 0;
  std::vector<NodeId> neighbors;                         // sorted
  std::map<NodeId, std::vector<NodeId>> neighbor_lists;  // Γ_w for each w in neighbors

  bool operator==(const LocalView&) const = default;
};

/// The view node v assembles on a static graph.
inline LocalView protocol_view(const Graph& g, NodeId v) {
  LocalView view;
  view.me = v;
  view.neighbors.assign(g.neighbors(v).begin(), g.neighbors(v).end());
  for (NodeId w : view.neighbors) view.neighbor_lists[w].assign(g.neighbors(w).begin(), g.neighbors(w).end());
  return view;
}

/// Local graph of a view, relabelled densely; to_parent maps back to ids.
inline Subgraph view_graph(const LocalView& view) {
  std::vector<NodeId> ids{view.me};
  for (NodeId w : view.neighbors) {
    ids.push_back(w);
    if (auto it = view.neighbor_lists.find(w); it != view.neighbor_lists.end())
      ids.insert(ids.end(), it->second.begin(), it->second.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Subgraph sub{Graph(ids.size()), ids};
  const NodeId me = *sub.local(view.me);
  for (NodeId w : view.neighbors) {
    const NodeId lw = *sub.local(w);
    sub.graph.add_edge(me, lw);
    if (auto it = view.neighbor_lists.find(w); it != view.neighbor_lists.end())
      for (NodeId x : it->second)
        if (x != w) sub.graph.add_edge(lw, *sub.local(x));
  }
  return sub;
}

/// One global path search: find `rounds` further source-target paths in G/me
/// that avoid `avoid` and each other.
struct SearchRequest {
  NodeId source = 0;
  NodeId target = 0;
  std::vector<NodeId> avoid;  // internal nodes of the local real paths
  int rounds = 1;

  friend bool operator==(const SearchRequest&, const SearchRequest&) = default;
};

enum class Decision {
  Isolated,          // no neighbours at all
  DegreeRule,        // a neighbour has degree <= k
  ImaginaryTrusted,  // augmented graph minus v is k-connected
  LocalPairs,        // every neighbour pair already has k paths without v
  NeedsSearch,
};

struct DetectionPlan {
  NodeStatus status = NodeStatus::Joint;
  Decision decision = Decision::NeedsSearch;
  double support = 0.0;
  std::vector<SearchRequest> searches;
  ImaginaryAugmentation augmentation;
};

/// Status detection on a local view: support degree, the degree rule, the
/// imaginary k-connected graph, and the global searches still required.
inline DetectionPlan plan_detection(const LocalView& view, int k, AugmentOptions opts = {}) {
  DetectionPlan plan;
  Subgraph sub = view_graph(view);
  const Graph& gv = sub.graph;
  const NodeId me = *sub.local(view.me);
  plan.support = support_degree(gv, me, k);

  if (gv.degree(me) == 0) {
    plan.decision = Decision::Isolated;
    return plan;
  }
  for (NodeId w : gv.neighbors(me))
    if (static_cast<int>(gv.degree(w)) <= k) {
      plan.decision = Decision::DegreeRule;
      return plan;
    }

  plan.augmentation = build_imaginary_kconnected(gv, me, k, opts);
  // Imaginary edges may only vouch for connectivity when they add no path
  // between two neighbours; otherwise they could stand for a detour through
  // nodes already in use and fake a Trusted label.
  if (plan.augmentation.path_neutral() && is_k_connected(remove_node(plan.augmentation.augmented, me).graph, k)) {
    plan.status = NodeStatus::Trusted;
    plan.decision = Decision::ImaginaryTrusted;
    return plan;
  }

  Subgraph reduced = remove_node(gv, me);  // pair edges are added as searches are planned
  Subgraph real = remove_node(gv, me);
  SplitFlow real_flow(real.graph);
  std::vector<NodeId> nb;  // neighbours in local ids of the reduced graphs
  for (NodeId w : gv.neighbors(me)) nb.push_back(*reduced.local(w));
  Graph& work = reduced.graph;
  // reduced and real share node numbering: both drop `me` from the same node set
  auto degree_of = [&](NodeId x) { return gv.degree(reduced.to_parent[x]); };
  auto global_of = [&](NodeId x) { return sub.to_parent[reduced.to_parent[x]]; };

  while (true) {
    SplitFlow flow(work);
    bool found = false;
    std::tuple<std::size_t, std::size_t, NodeId, NodeId> best_key{};
    NodeId bx = 0, by = 0;
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        NodeId x = nb[i], y = nb[j];
        if (work.has_edge(x, y)) continue;
        if (flow.max_paths(x, y, k) >= k) continue;
        std::size_t dx = degree_of(x), dy = degree_of(y);
        NodeId s = dx <= dy ? x : y, t = dx <= dy ? y : x;
        auto key = std::make_tuple(std::min(dx, dy), std::max(dx, dy), global_of(s), global_of(t));
        if (!found || key < best_key) {
          found = true;
          best_key = key;
          bx = s;
          by = t;
        }
      }
    if (!found) break;
    work.add_edge(bx, by);

    const NodeId gs = global_of(bx), gt = global_of(by);
    SearchRequest req;
    req.source = gs;
    req.target = gt;
    const int have = real_flow.max_paths(bx, by);
    for (const auto& path : real_flow.paths())
      for (NodeId a : path) req.avoid.push_back(global_of(a));
    std::sort(req.avoid.begin(), req.avoid.end());
    req.rounds = std::max(1, k - have);
    plan.searches.push_back(std::move(req));
  }

  if (plan.searches.empty()) {
    plan.status = NodeStatus::Trusted;
    plan.decision = Decision::LocalPairs;
  } else {
    plan.decision = Decision::NeedsSearch;
  }
  return plan;
}

}  // namespace linar
