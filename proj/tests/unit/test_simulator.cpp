#include <gtest/gtest.h>

#include <set>

#include "linar/simulator.hpp"

using namespace linar;

namespace {

Topology small(int n, int k, std::uint64_t seed) { return generate(n, k, {200, 200}, 20, seed); }

}  // namespace

TEST(Ledger, BeaconsStayOutOfTotals) {
  ByteLedger l(3);
  l.record(0, MessageKind::Start, 12);
  l.record(1, MessageKind::Beacon, 4);
  l.record(2, MessageKind::Confirm, 6);
  EXPECT_EQ(l.total_bytes(), 18u);
  EXPECT_EQ(l.total_messages(), 2u);
  EXPECT_EQ(l.count(MessageKind::Beacon), 1u);
  EXPECT_EQ(l.node_bytes(1), 0u);
  l.record(7, MessageKind::Stat, 11);  // grows on demand
  EXPECT_EQ(l.nodes(), 8u);
}

TEST(WireSize, Schema) {
  Message m;
  m.kind = MessageKind::Start;
  EXPECT_EQ(m.wire_size(), 12u);
  m.kind = MessageKind::Ngb;
  m.gamma = {1, 2, 3};
  m.info = {{1, NodeStatus::Trusted, 2.0}};
  EXPECT_EQ(m.wire_size(), 4u + 30u + 12u);
  m.kind = MessageKind::Discover;
  m.avoid = {4, 5};
  EXPECT_EQ(m.wire_size(), 4u + 6u + 4u);
  m.kind = MessageKind::Explore;
  EXPECT_EQ(m.wire_size(), 10u);
  m.kind = MessageKind::Confirm;
  EXPECT_EQ(m.wire_size(), 6u);
  m.kind = MessageKind::Stat;  // carries its origin so neighbours can relay it
  EXPECT_EQ(m.wire_size(), 11u);
  m.kind = MessageKind::Beacon;
  EXPECT_EQ(m.wire_size(), 4u);
}

TEST(PhaseOne, OneStartPerNodeAndConservation) {
  Topology t = small(30, 2, 3);
  Simulator sim(t, 2, 0.0);
  sim.run_phase1();
  const auto& l = sim.ledger();
  EXPECT_EQ(l.count(MessageKind::Start), 30u);
  EXPECT_EQ(l.bytes(MessageKind::Start), 30u * 12u);
  EXPECT_GE(l.count(MessageKind::Ngb), 30u);
  std::uint64_t sum = 0;
  for (NodeId v = 0; v < 30; ++v) sum += l.node_bytes(v);
  EXPECT_EQ(sum, l.total_bytes());
  EXPECT_GT(l.count(MessageKind::Beacon), 0u);
  EXPECT_EQ(sim.total_movement(), 0.0);
}

TEST(PhaseOne, LabelsMatchOracle) {
  for (int t = 0; t < 12; ++t) {
    const int k = 1 + t % 3;
    Topology topo = small(15 + 3 * t, k, 100 + t);
    const Graph g = to_graph(topo);
    Simulator sim(topo, k, 0.0);
    sim.run_phase1();
    for (NodeId v = 0; v < static_cast<NodeId>(g.size()); ++v)
      EXPECT_EQ(sim.agent(v).status() == NodeStatus::Trusted, is_trusted_oracle(g, v))
          << "topology " << t << " node " << v;
  }
}

TEST(PhaseOne, SearchFanOutBounds) {
  int rounds = 0;
  for (int t = 0; t < 6; ++t) {
    Topology topo = small(40, 2 + t % 2, 200 + t);
    Simulator sim(topo, topo.k, 0.0);
    sim.run_phase1();
    for (const auto& [key, st] : sim.searches()) {
      ++rounds;
      EXPECT_LE(st.discover_tx, st.max_degree + 1);
      EXPECT_LE(st.explore_tx, st.live_nodes);
    }
  }
  EXPECT_GT(rounds, 0);
}

TEST(Simulator, DeterministicReplay) {
  Topology t = small(35, 2, 8);
  auto run = [&] {
    Simulator sim(t, 2, 0.3);
    sim.run_phase1();
    for (NodeId w : {3, 17, 29}) sim.fail_node(w);
    return std::make_tuple(sim.ledger().bytes_by_kind(), sim.ledger().counts_by_kind(), sim.positions(),
                           sim.notes(), sim.events_processed(), sim.time());
  };
  EXPECT_EQ(run(), run());
}

TEST(Restoration, TrustedFailureMovesNobody) {
  Topology t = small(40, 2, 12);
  Simulator sim(t, 2, 0.0);
  sim.run_phase1();
  const Graph g = to_graph(t);
  int tried = 0;
  for (NodeId v = 0; v < 40 && tried < 3; ++v) {
    if (sim.agent(v).status() != NodeStatus::Trusted) continue;
    Simulator copy = sim;
    auto res = copy.fail_node(v);
    EXPECT_EQ(res.failed_status, NodeStatus::Trusted);
    EXPECT_EQ(res.moves, 0);
    EXPECT_EQ(res.movement, 0.0);
    ++tried;
  }
  EXPECT_GT(tried, 0);
}

TEST(Restoration, JointFailureKeepsKConnectivity) {
  int joint = 0;
  for (int t = 0; t < 8; ++t) {
    const int k = 2 + t % 2;
    Topology topo = small(25 + 4 * t, k, 300 + t);
    Simulator sim(topo, k, 0.0);
    sim.run_phase1();
    for (NodeId v = 0; v < static_cast<NodeId>(topo.size()); ++v) {
      if (sim.agent(v).status() != NodeStatus::Joint) continue;
      ++joint;
      Simulator copy = sim;
      auto res = copy.fail_node(v);
      EXPECT_GE(res.moves, 1);
      EXPECT_TRUE(is_k_connected(copy.live_graph().graph, k)) << "topology " << t << " node " << v;
      // the first mover lands on the vacancy, and no two nodes share a spot
      auto pos = copy.live_positions();
      std::set<std::pair<double, double>> spots;
      for (auto p : pos) spots.insert({p.x, p.y});
      EXPECT_EQ(spots.size(), pos.size());
      if (!res.movers.empty()) {
        EXPECT_EQ(copy.positions()[res.movers.front()], topo.nodes[v]);
      }
      std::set<NodeId> distinct(res.movers.begin(), res.movers.end());
      EXPECT_EQ(distinct.size(), res.movers.size());
      EXPECT_GE(res.end_time - res.start_time, 10.0);
    }
  }
  EXPECT_GT(joint, 10);
}

TEST(Restoration, RejectsDeadOrUnknownNodes) {
  Topology t = small(20, 2, 1);
  Simulator sim(t, 2, 0.0);
  sim.run_phase1();
  EXPECT_THROW(sim.fail_node(20), std::domain_error);
  sim.fail_node(0);
  EXPECT_THROW(sim.fail_node(0), std::domain_error);
  EXPECT_FALSE(sim.alive(0));
}
