#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "linar/connectivity.hpp"
#include "linar/geometry.hpp"
#include "linar/graph.hpp"
#include "linar/hungarian.hpp"
#include "linar/messages.hpp"
#include "linar/simulator.hpp"
#include "linar/topology.hpp"

namespace linar {

/// Live nodes of a deployment at one instant. ids[i] sits at pos[i].
struct Snapshot {
  std::vector<NodeId> ids;
  std::vector<Position> pos;
  double range = 20.0;

  std::size_t size() const { return ids.size(); }

  std::size_t index_of(NodeId id) const {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw std::domain_error("snapshot: unknown node id " + std::to_string(id));
    return static_cast<std::size_t>(it - ids.begin());
  }

  Snapshot without(NodeId id) const {
    Snapshot s;
    s.range = range;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] != id) {
        s.ids.push_back(ids[i]);
        s.pos.push_back(pos[i]);
      }
    return s;
  }

  Graph graph() const { return unit_disk_graph(pos, range); }
};

inline Snapshot snapshot_of(const Topology& t) {
  Snapshot s;
  s.range = t.range;
  s.pos = t.nodes;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) s.ids.push_back(static_cast<NodeId>(i));
  return s;
}

struct PlannedMove {
  NodeId node = 0;
  Position from{};
  Position to{};
};

struct RestorationPlan {
  std::vector<PlannedMove> moves;
  double total_cost = 0.0;
};

class RestorationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot after the failure with every planned move applied. Spare nodes
/// that are not in the snapshot yet are added at their destination.
inline Snapshot apply_plan(const Snapshot& before, NodeId failed, const RestorationPlan& plan) {
  Snapshot s = before.without(failed);
  for (const auto& m : plan.moves) {
    auto it = std::find(s.ids.begin(), s.ids.end(), m.node);
    if (it == s.ids.end()) {
      s.ids.push_back(m.node);
      s.pos.push_back(m.to);
    } else {
      s.pos[static_cast<std::size_t>(it - s.ids.begin())] = m.to;
    }
  }
  return s;
}

namespace detail {

inline bool geometry_k_connected(const std::vector<Position>& pos, double range, int k) {
  return is_k_connected(unit_disk_graph(pos, range), k);
}

inline void add_move(RestorationPlan& plan, NodeId node, Position from, Position to) {
  if (from == to) return;
  plan.moves.push_back({node, from, to});
  plan.total_cost += euclidean_cost(from, to);
}

/// Positions of the snapshot with the failed node's spot kept as a target.
struct PositionSet {
  std::vector<Position> spots;   // every position, failed one included
  std::vector<std::size_t> own;  // spot index of each live node
  std::vector<NodeId> live;
};

inline PositionSet position_set(const Snapshot& s, NodeId failed) {
  PositionSet ps;
  ps.spots = s.pos;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.ids[i] != failed) {
      ps.live.push_back(s.ids[i]);
      ps.own.push_back(i);
    }
  if (ps.live.size() + 1 != s.size()) throw std::domain_error("restore: failed node not in snapshot");
  return ps;
}

inline std::vector<Position> spots_without(const std::vector<Position>& spots, std::size_t drop) {
  std::vector<Position> out;
  out.reserve(spots.size());
  for (std::size_t i = 0; i < spots.size(); ++i)
    if (i != drop) out.push_back(spots[i]);
  return out;
}

/// Greedy and Localized share the vacancy chain; only the choice differs.
template <class Pick>
RestorationPlan chain_restore(const Snapshot& s, NodeId failed, int k, Pick pick, const char* name) {
  Snapshot cur = s.without(failed);
  Position vacancy = s.pos[s.index_of(failed)];
  std::vector<char> moved(cur.size(), 0);
  RestorationPlan plan;
  const std::size_t budget = s.size();
  for (std::size_t step = 0;; ++step) {
    if (geometry_k_connected(cur.pos, cur.range, k)) return plan;
    if (step == budget) throw RestorationInfeasible(std::string(name) + ": move budget exhausted");
    Graph g = cur.graph();
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < cur.size(); ++i)
      if (!moved[i] && in_range(cur.pos[i], vacancy, cur.range)) cand.push_back(i);
    if (cand.empty()) throw RestorationInfeasible(std::string(name) + ": vacancy has no unmoved neighbour");
    std::size_t best = pick(cur, g, vacancy, cand);
    Position old = cur.pos[best];
    add_move(plan, cur.ids[best], old, vacancy);
    cur.pos[best] = vacancy;
    moved[best] = 1;
    vacancy = old;
  }
}

}  // namespace detail

/// Optimal relocation onto the original position set: abandon one position,
/// assign the live nodes to the rest at minimum total distance.
inline RestorationPlan mccr_restore(const Snapshot& s, NodeId failed, int k) {
  const auto ps = detail::position_set(s, failed);
  const std::size_t fail_spot = s.index_of(failed);
  if (detail::geometry_k_connected(detail::spots_without(ps.spots, fail_spot), s.range, k)) return {};

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_spot_of;  // per live node
  for (std::size_t drop = 0; drop < ps.spots.size(); ++drop) {
    if (drop == fail_spot) continue;
    auto remaining = detail::spots_without(ps.spots, drop);
    if (!detail::geometry_k_connected(remaining, s.range, k)) continue;
    std::vector<std::size_t> spot_index;
    for (std::size_t i = 0; i < ps.spots.size(); ++i)
      if (i != drop) spot_index.push_back(i);
    std::vector<std::vector<double>> cost(ps.live.size(), std::vector<double>(remaining.size()));
    for (std::size_t r = 0; r < ps.live.size(); ++r)
      for (std::size_t c = 0; c < remaining.size(); ++c)
        cost[r][c] = euclidean_cost(ps.spots[ps.own[r]], remaining[c]);
    Assignment a = solve_assignment(cost);
    if (a.cost < best_cost) {
      best_cost = a.cost;
      best_spot_of.clear();
      for (int c : a.col_of_row) best_spot_of.push_back(spot_index[static_cast<std::size_t>(c)]);
    }
  }
  if (best_spot_of.empty()) throw RestorationInfeasible("mccr: no position subset is k-connected");
  RestorationPlan plan;
  for (std::size_t r = 0; r < ps.live.size(); ++r)
    detail::add_move(plan, ps.live[r], ps.spots[ps.own[r]], ps.spots[best_spot_of[r]]);
  return plan;
}

/// Shortest-path tree rooted at the failed position over the complete
/// movement-cost graph; the cheapest safe node shifts along its tree path.
inline RestorationPlan tapu_restore(const Snapshot& s, NodeId failed, int k) {
  const auto ps = detail::position_set(s, failed);
  const std::size_t fail_spot = s.index_of(failed);
  if (detail::geometry_k_connected(detail::spots_without(ps.spots, fail_spot), s.range, k)) return {};

  // Dijkstra over spots; root is the failed spot
  const std::size_t n = ps.spots.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<char> done(n, 0);
  dist[fail_spot] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && (u == n || dist[i] < dist[u])) u = i;
    done[u] = 1;
    for (std::size_t w = 0; w < n; ++w) {
      if (done[w]) continue;
      double d = dist[u] + euclidean_cost(ps.spots[u], ps.spots[w]);
      if (d < dist[w]) {
        dist[w] = d;
        parent[w] = u;
      }
    }
  }

  // a safe node: vacating its spot leaves a k-connected position set
  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == fail_spot) continue;
    if (best != n && !(dist[i] < dist[best])) continue;
    if (detail::geometry_k_connected(detail::spots_without(ps.spots, i), s.range, k)) best = i;
  }
  if (best == n) throw RestorationInfeasible("tapu: no safe node");

  RestorationPlan plan;
  for (std::size_t v = best; v != fail_spot; v = parent[v])
    detail::add_move(plan, s.ids[v], ps.spots[v], ps.spots[parent[v]]);
  return plan;
}

/// Moves the nearest neighbour of the vacancy until the network is k-connected.
inline RestorationPlan greedy_restore(const Snapshot& s, NodeId failed, int k) {
  auto nearest = [](const Snapshot& cur, const Graph&, Position vacancy, const std::vector<std::size_t>& cand) {
    std::size_t best = cand.front();
    for (std::size_t i : cand) {
      double a = euclidean_cost(cur.pos[i], vacancy), b = euclidean_cost(cur.pos[best], vacancy);
      if (a < b || (a == b && cur.ids[i] < cur.ids[best])) best = i;
    }
    return best;
  };
  return detail::chain_restore(s, failed, k, nearest, "greedy");
}

/// Moves the smallest-degree neighbour of the vacancy, lower id on ties.
inline RestorationPlan localized_restore(const Snapshot& s, NodeId failed, int k) {
  auto lowest_degree = [](const Snapshot& cur, const Graph& g, Position, const std::vector<std::size_t>& cand) {
    std::size_t best = cand.front();
    for (std::size_t i : cand) {
      auto a = g.degree(static_cast<NodeId>(i)), b = g.degree(static_cast<NodeId>(best));
      if (a < b || (a == b && cur.ids[i] < cur.ids[best])) best = i;
    }
    return best;
  };
  return detail::chain_restore(s, failed, k, lowest_degree, "localized");
}

/// Spare pool at a depot: each failure pulls one spare onto the vacancy.
class SparePool {
 public:
  SparePool(Position depot, std::size_t spares, NodeId first_id)
      : depot_(depot), left_(spares), next_id_(first_id) {}

  RestorationPlan restore(const Snapshot& s, NodeId failed) {
    if (left_ == 0) throw RestorationInfeasible("basic: spare pool empty");
    --left_;
    RestorationPlan plan;
    plan.moves.push_back({next_id_++, depot_, s.pos[s.index_of(failed)]});
    plan.total_cost = euclidean_cost(depot_, plan.moves.back().to);
    return plan;
  }

  std::size_t remaining() const { return left_; }
  Position depot() const { return depot_; }

 private:
  Position depot_;
  std::size_t left_;
  NodeId next_id_;
};

/// Exact minimum over every assignment of live nodes onto the original
/// position set minus one spot, with at most move_budget relocations.
inline RestorationPlan brute_force_optimal(const Snapshot& s, NodeId failed, int k, int move_budget) {
  if (s.size() > 10) throw std::domain_error("brute_force_optimal: at most 10 nodes");
  const auto ps = detail::position_set(s, failed);
  const std::size_t n = ps.spots.size();
  const std::size_t m = ps.live.size();
  const double inf = std::numeric_limits<double>::infinity();
  const int max_moves = std::min<int>(move_budget, static_cast<int>(m));
  if (max_moves < 0) throw std::domain_error("brute_force_optimal: negative move budget");

  double best_cost = inf;
  std::vector<std::size_t> best_assign;
  for (std::size_t drop = 0; drop < n; ++drop) {
    auto remaining = detail::spots_without(ps.spots, drop);
    if (!detail::geometry_k_connected(remaining, s.range, k)) continue;
    std::vector<std::size_t> spot_index;
    for (std::size_t i = 0; i < n; ++i)
      if (i != drop) spot_index.push_back(i);
    // dp[mask][moves]: live nodes 0..popcount(mask)-1 placed on the spots in mask
    const std::size_t full = std::size_t{1} << m;
    const std::size_t w = static_cast<std::size_t>(max_moves) + 1;
    std::vector<double> dp(full * w, inf);
    std::vector<std::int8_t> choice(full * w, -1);
    dp[0] = 0.0;
    for (std::size_t mask = 0; mask < full; ++mask) {
      const auto r = static_cast<std::size_t>(__builtin_popcountll(mask));
      if (r == m) continue;
      for (std::size_t mv = 0; mv < w; ++mv) {
        const double base = dp[mask * w + mv];
        if (base == inf) continue;
        for (std::size_t c = 0; c < m; ++c) {
          if (mask >> c & 1) continue;
          const bool moves = spot_index[c] != ps.own[r];
          const std::size_t nmv = mv + (moves ? 1 : 0);
          if (nmv >= w) continue;
          const double cost = base + euclidean_cost(ps.spots[ps.own[r]], remaining[c]);
          const std::size_t at = (mask | (std::size_t{1} << c)) * w + nmv;
          if (cost < dp[at]) {
            dp[at] = cost;
            choice[at] = static_cast<std::int8_t>(c);
          }
        }
      }
    }
    const std::size_t last = full - 1;
    for (std::size_t mv = 0; mv < w; ++mv) {
      if (!(dp[last * w + mv] < best_cost)) continue;
      best_cost = dp[last * w + mv];
      best_assign.assign(m, 0);
      std::size_t mask = last, cur_mv = mv;
      for (std::size_t r = m; r-- > 0;) {
        const auto c = static_cast<std::size_t>(choice[mask * w + cur_mv]);
        best_assign[r] = spot_index[c];
        if (spot_index[c] != ps.own[r]) --cur_mv;
        mask &= ~(std::size_t{1} << c);
      }
    }
  }
  if (best_assign.empty() && m > 0) throw RestorationInfeasible("brute_force_optimal: no feasible plan in budget");
  RestorationPlan plan;
  for (std::size_t r = 0; r < m; ++r) detail::add_move(plan, ps.live[r], ps.spots[ps.own[r]], ps.spots[best_assign[r]]);
  return plan;
}

/// Message accounting for the centralised algorithms: every live node reports
/// its neighbour list to the sink over a BFS tree, then the sink routes one
/// command to each mover. The sink is the lowest live id.
inline void central_ledger(const Snapshot& live, const RestorationPlan& plan, ByteLedger& ledger) {
  if (live.size() == 0) return;
  Graph g = live.graph();
  const std::size_t sink = static_cast<std::size_t>(std::min_element(live.ids.begin(), live.ids.end()) - live.ids.begin());
  std::vector<int> parent(live.size(), -1);
  std::vector<char> seen(live.size(), 0);
  std::queue<NodeId> q;
  q.push(static_cast<NodeId>(sink));
  seen[sink] = 1;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId w : g.neighbors(u))
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = u;
        q.push(w);
      }
  }
  for (std::size_t u = 0; u < live.size(); ++u) {
    if (u == sink || !seen[u]) continue;
    Message r;
    r.kind = MessageKind::Report;
    r.payload_count = g.degree(static_cast<NodeId>(u));
    for (int hop = static_cast<int>(u); hop != static_cast<int>(sink); hop = parent[hop])
      ledger.record(live.ids[hop], MessageKind::Report, r.wire_size());
  }
  Message c;
  c.kind = MessageKind::Command;
  for (const auto& mv : plan.moves) {
    auto it = std::find(live.ids.begin(), live.ids.end(), mv.node);
    if (it == live.ids.end()) continue;
    const auto target = static_cast<int>(it - live.ids.begin());
    if (!seen[static_cast<std::size_t>(target)]) continue;
    // one transmission per hop on the way down from the sink
    for (int hop = target; hop != static_cast<int>(sink); hop = parent[hop])
      ledger.record(live.ids[parent[hop]], MessageKind::Command, c.wire_size());
  }
}

/// Basic: the sink sends a single one-hop command per failure.
inline void basic_ledger(const Snapshot& live, ByteLedger& ledger) {
  if (live.size() == 0) return;
  Message c;
  c.kind = MessageKind::Command;
  ledger.record(*std::min_element(live.ids.begin(), live.ids.end()), MessageKind::Command, c.wire_size());
}

}  // namespace linar
