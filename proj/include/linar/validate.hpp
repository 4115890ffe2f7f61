#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "linar/connectivity.hpp"
#include "linar/imaginary.hpp"
#include "linar/simulator.hpp"
#include "linar/topology.hpp"

namespace linar {

struct PropertyResult {
  std::string name;
  bool passed = true;
  long checked = 0;
  long violations = 0;
  std::string detail;
};

struct ValidateOptions {
  bool restoration = true;  // fail every Joint node once on a copy of the network
  SimConfig sim{};
};

namespace detail {

inline PropertyResult& property(std::vector<PropertyResult>& out, const std::string& name) {
  PropertyResult p;
  p.name = name;
  out.push_back(std::move(p));
  return out.back();
}

inline void violate(PropertyResult& p, const std::string& what) {
  p.passed = false;
  ++p.violations;
  if (p.detail.size() < 200) p.detail += (p.detail.empty() ? "" : "; ") + what;
}

}  // namespace detail

/// Runs the protocol on a static topology and checks it against the exact
/// graph oracles.
inline std::vector<PropertyResult> validate_topology(const Topology& topo, int k, const ValidateOptions& opts = {}) {
  using detail::property;
  using detail::violate;
  std::vector<PropertyResult> out;
  out.reserve(16);  // results are filled through references
  const Graph g = to_graph(topo);
  const auto n = static_cast<NodeId>(g.size());

  auto& conn = property(out, "k_connected");
  conn.checked = 1;
  const int kappa = vertex_connectivity(g).kappa;
  if (!is_k_connected(g, k)) violate(conn, "kappa " + std::to_string(kappa) + " < " + std::to_string(k));

  std::vector<char> oracle(static_cast<std::size_t>(n), 0);
  for (NodeId v = 0; v < n; ++v) oracle[static_cast<std::size_t>(v)] = g.size() >= 3 && is_trusted_oracle(g, v);

  auto& deg = property(out, "degree_rule_sound");
  auto& shortcut = property(out, "local_trusted_sound");
  auto& remarks = property(out, "imaginary_edges_well_formed");
  auto& bound = property(out, "local_paths_bounded_by_global");
  for (NodeId v = 0; v < n; ++v) {
    const LocalView view = protocol_view(g, v);
    const DetectionPlan plan = plan_detection(view, k, opts.sim.augment);
    const bool truth = oracle[static_cast<std::size_t>(v)];
    if (plan.decision == Decision::DegreeRule) {
      ++deg.checked;
      if (truth) violate(deg, "node " + std::to_string(v));
    }
    if (plan.decision == Decision::ImaginaryTrusted || plan.decision == Decision::LocalPairs) {
      ++shortcut.checked;
      if (!truth) violate(shortcut, "node " + std::to_string(v));
    }
    const auto& aug = plan.augmentation;
    if (!aug.success) continue;
    const Subgraph sub = view_graph(view);
    const NodeId me = *sub.local(v);
    ++remarks.checked;
    for (auto [a, b] : aug.chosen) {
      if (a == me || b == me || sub.graph.has_edge(a, me) || sub.graph.has_edge(b, me))
        violate(remarks, "edge touches node " + std::to_string(v) + " or its neighbours");
      if (disjoint_paths(sub.graph, a, b) >= k) violate(remarks, "edge already had k paths at " + std::to_string(v));
    }
    ++bound.checked;
    const auto nb = aug.augmented.neighbors(me);
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        const NodeId x = nb[i], y = nb[j];
        if (disjoint_paths(aug.augmented, x, y) > disjoint_paths(g, sub.to_parent[x], sub.to_parent[y])) {
          violate(bound, "node " + std::to_string(v));
          i = nb.size();
          break;
        }
      }
  }

  Simulator sim(topo, k, 0.0, opts.sim);
  sim.run_phase1();
  auto& labels = property(out, "labels_match_oracle");
  for (NodeId v = 0; v < n; ++v) {
    ++labels.checked;
    if ((sim.agent(v).status() == NodeStatus::Trusted) != static_cast<bool>(oracle[static_cast<std::size_t>(v)]))
      violate(labels, "node " + std::to_string(v));
  }
  auto& fan = property(out, "discover_fanout");
  for (const auto& [key, st] : sim.searches()) {
    ++fan.checked;
    if (st.discover_tx > st.max_degree + 1) violate(fan, "search from " + std::to_string(key.initiator));
  }

  if (opts.restoration) {
    auto& rest = property(out, "restoration_keeps_k");
    for (NodeId v = 0; v < n; ++v) {
      if (oracle[static_cast<std::size_t>(v)]) continue;
      ++rest.checked;
      Simulator copy = sim;
      copy.fail_node(v);
      if (!is_k_connected(copy.live_graph().graph, k)) violate(rest, "failure of " + std::to_string(v));
    }
  }
  return out;
}

}  // namespace linar
