#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the
// max-flow engine; the oracles work by exhaustive enumeration.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "linar/geometry.hpp"
#include "linar/graph.hpp"

namespace linar::testing {

inline Graph random_geometric_graph(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Position> p(n);
  for (auto& q : p) q = {u(rng), u(rng)};
  Graph g(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::hypot(p[a].x - p[b].x, p[a].y - p[b].y) <= radius) g.add_edge(a, b);
  return g;
}

inline std::uint32_t mask_of(const Graph& g, NodeId v) {
  std::uint32_t m = 0;
  for (NodeId w : g.neighbors(v)) m |= 1u << w;
  return m;
}

/// Connectedness of the nodes in `alive` (bitmask), by flood fill.
inline bool connected_mask(const Graph& g, std::uint32_t alive) {
  if (alive == 0) return true;
  std::uint32_t seen = alive & (~alive + 1);
  std::uint32_t frontier = seen;
  while (frontier) {
    std::uint32_t next = 0;
    for (int v = 0; v < 32; ++v)
      if (frontier & (1u << v)) next |= mask_of(g, v) & alive;
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == alive;
}

/// Vertex connectivity by enumerating node cuts of increasing size.
inline int brute_kappa(const Graph& g) {
  const int n = static_cast<int>(g.size());
  const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
  if (!connected_mask(g, all)) return 0;
  int best = n - 1;
  for (std::uint32_t cut = 1; cut < (1u << n); ++cut) {
    int sz = __builtin_popcount(cut);
    if (sz >= best || sz > n - 2) continue;
    if (!connected_mask(g, all & ~cut)) best = sz;
  }
  return best;
}

/// Maximum packing of internally disjoint x-y paths by enumerating every
/// simple path and solving the packing by subset DP.
inline int brute_disjoint_paths(const Graph& g, NodeId x, NodeId y) {
  const int n = static_cast<int>(g.size());
  std::vector<std::uint32_t> interiors;
  int direct = g.has_edge(x, y) ? 1 : 0;
  std::function<void(NodeId, std::uint32_t, std::uint32_t)> dfs = [&](NodeId at, std::uint32_t visited,
                                                                        std::uint32_t inner) {
    for (NodeId w : g.neighbors(at)) {
      if (visited & (1u << w)) continue;
      if (w == y) {
        if (at != x) interiors.push_back(inner);
        continue;
      }
      dfs(w, visited | (1u << w), inner | (1u << w));
    }
  };
  dfs(x, (1u << x), 0);
  std::sort(interiors.begin(), interiors.end());
  interiors.erase(std::unique(interiors.begin(), interiors.end()), interiors.end());
  const std::uint32_t universe = ((1u << n) - 1) & ~(1u << x) & ~(1u << y);
  std::vector<int> best(1u << n, 0);
  for (std::uint32_t s = 1; s < (1u << n); ++s) {
    if (s & ~universe) continue;
    std::uint32_t low = s & (~s + 1);
    int b = best[s & ~low];
    for (auto m : interiors)
      if ((m & low) && (m & ~s) == 0) b = std::max(b, 1 + best[s & ~m]);
    best[s] = b;
  }
  return direct + best[universe];
}

}  // namespace linar::testing
