#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "linar/baselines.hpp"
#include "linar/hungarian.hpp"
#include "linar/simulator.hpp"

using namespace linar;

namespace {

// Exhaustive oracle: drop one spot, try every bijection of live nodes onto
// the rest.
double permutation_optimum(const Snapshot& s, NodeId failed, int k) {
  std::vector<Position> live;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.ids[i] != failed) live.push_back(s.pos[i]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t drop = 0; drop < s.size(); ++drop) {
    std::vector<Position> spots;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != drop) spots.push_back(s.pos[i]);
    if (!is_k_connected(unit_disk_graph(spots, s.range), k)) continue;
    std::vector<int> perm(spots.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double c = 0;
      for (std::size_t i = 0; i < live.size(); ++i) c += euclidean_cost(live[i], spots[perm[i]]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return best;
}

struct Instance {
  Snapshot s;
  NodeId failed;
  int k;
};

// Small k-connected deployments with a failure that breaks k-connectivity
// whenever one exists.
std::vector<Instance> instances(int count, int max_n, std::uint64_t seed) {
  std::vector<Instance> out;
  for (int t = 0; static_cast<int>(out.size()) < count; ++t) {
    const int k = 1 + t % 3;
    const int n = std::max(k + 3, 5 + t % (max_n - 4));
    Topology topo = generate(n, k, {80, 80}, 20, seed + static_cast<std::uint64_t>(t));
    Snapshot s = snapshot_of(topo);
    NodeId failed = static_cast<NodeId>(t % n);
    for (NodeId v = 0; v < n; ++v)
      if (!is_k_connected(s.without(v).graph(), k)) {
        failed = v;
        if (t % 2 == 0) break;
      }
    out.push_back({s, failed, k});
  }
  return out;
}

void expect_restores(const Instance& in, const RestorationPlan& plan) {
  Snapshot after = apply_plan(in.s, in.failed, plan);
  EXPECT_TRUE(is_k_connected(after.graph(), in.k));
  double sum = 0;
  for (const auto& m : plan.moves) sum += euclidean_cost(m.from, m.to);
  EXPECT_NEAR(plan.total_cost, sum, 1e-9);
}

}  // namespace

TEST(Hungarian, MatchesPermutationSearch) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + trial % 6, cols = rows + trial % 3;
    std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
    for (auto& r : c)
      for (auto& x : r) x = static_cast<double>(rng() % 100) / 7.0;
    std::vector<int> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double s = 0;
      for (int i = 0; i < rows; ++i) s += c[i][perm[i]];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto a = solve_assignment(c);
    EXPECT_NEAR(a.cost, best, 1e-9);
    std::vector<int> used(cols, 0);
    double s = 0;
    for (int i = 0; i < rows; ++i) {
      ASSERT_EQ(used[a.col_of_row[i]]++, 0);
      s += c[i][a.col_of_row[i]];
    }
    EXPECT_NEAR(s, a.cost, 1e-9);
  }
}

TEST(Hungarian, RejectsBadShapes) {
  EXPECT_THROW(solve_assignment({{1, 2}, {3, 4}, {5, 6}}), std::domain_error);
  EXPECT_THROW(solve_assignment({{1, 2, 3}, {4, 5}}), std::domain_error);
  EXPECT_EQ(solve_assignment({}).cost, 0.0);
}

TEST(Mccr, AlreadyConnectedMeansNoMoves) {
  Topology t = generate(12, 2, {80, 80}, 20, 4);
  Snapshot s = snapshot_of(t);
  for (NodeId v = 0; v < 12; ++v)
    if (is_k_connected(s.without(v).graph(), 2)) {
      auto plan = mccr_restore(s, v, 2);
      EXPECT_TRUE(plan.moves.empty());
      EXPECT_EQ(plan.total_cost, 0.0);
    }
}

TEST(Mccr, MatchesExhaustiveBijections) {
  for (const auto& in : instances(40, 8, 1000)) {
    auto plan = mccr_restore(in.s, in.failed, in.k);
    EXPECT_NEAR(plan.total_cost, permutation_optimum(in.s, in.failed, in.k), 1e-9);
    expect_restores(in, plan);
  }
}

TEST(Mccr, SquareWithSpareMovesOnlyTheSpare) {
  // C4 of side 10 with a fifth node left of it, range 12; corner 1 fails
  Snapshot s;
  s.range = 12;
  s.ids = {0, 1, 2, 3, 4};
  s.pos = {{0, 0}, {10, 0}, {10, 10}, {0, 10}, {-5, 5}};
  ASSERT_EQ(vertex_connectivity(s.graph()).kappa, 2);
  EXPECT_TRUE(is_trusted_oracle(s.graph(), 4));
  auto plan = mccr_restore(s, 1, 2);
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.moves[0].node, 4);
  EXPECT_EQ(plan.moves[0].to, (Position{10, 0}));
  EXPECT_NEAR(plan.total_cost, std::hypot(15.0, 5.0), 1e-12);
  EXPECT_NEAR(brute_force_optimal(s, 1, 2, 5).total_cost, plan.total_cost, 1e-12);
  EXPECT_NEAR(tapu_restore(s, 1, 2).total_cost, plan.total_cost, 1e-12);
}

TEST(Mccr, InfeasibleIsReported) {
  // three nodes in a row cannot be 2-connected once one is gone
  Snapshot s;
  s.range = 12;
  s.ids = {0, 1, 2};
  s.pos = {{0, 0}, {10, 0}, {5, 8}};
  EXPECT_THROW(mccr_restore(s, 0, 2), RestorationInfeasible);
  EXPECT_THROW(tapu_restore(s, 0, 2), RestorationInfeasible);
}

TEST(Tapu, EqualsMccrCost) {
  for (const auto& in : instances(40, 9, 2000)) {
    auto t = tapu_restore(in.s, in.failed, in.k);
    EXPECT_NEAR(t.total_cost, mccr_restore(in.s, in.failed, in.k).total_cost, 1e-9);
    expect_restores(in, t);
  }
}

TEST(Tapu, TrustedNeighbourSingleMove) {
  Snapshot s;
  s.range = 12;
  s.ids = {0, 1, 2, 3, 4};
  s.pos = {{0, 0}, {10, 0}, {10, 10}, {0, 10}, {-5, 5}};
  auto plan = tapu_restore(s, 0, 2);
  // node 4 is adjacent to the vacancy at (0,0) and safe to take
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.moves[0].node, 4);
  EXPECT_NEAR(plan.total_cost, std::hypot(5.0, 5.0), 1e-12);
}

TEST(ChainBaselines, NearestAndLowestDegree) {
  // node 0 joins a triangle {1,5,6} to the pair {2,7}; range 10, k = 1
  Snapshot s;
  s.range = 10;
  s.ids = {0, 1, 2, 5, 6, 7};
  s.pos = {{0, 0}, {3, 0}, {-8, 0}, {10, -3}, {6, -7}, {-15, 5}};
  ASSERT_FALSE(is_k_connected(s.without(0).graph(), 1));
  auto gr = greedy_restore(s, 0, 1);
  ASSERT_EQ(gr.moves.size(), 1u);
  EXPECT_EQ(gr.moves[0].node, 1);  // 3 m away
  auto lo = localized_restore(s, 0, 1);
  ASSERT_EQ(lo.moves.size(), 2u);
  EXPECT_EQ(lo.moves[0].node, 2);  // degree 1
  EXPECT_EQ(lo.moves[1].node, 7);  // chain into the vacancy node 2 left
  EXPECT_EQ(lo.moves[1].to, (Position{-8, 0}));
}

TEST(ChainBaselines, TiesGoToSmallerId) {
  // path 3-1-0-2-4 with 10 m spacing; 1 and 2 are symmetric around the failure
  Snapshot s;
  s.range = 10;
  s.ids = {0, 1, 2, 3, 4};
  s.pos = {{0, 0}, {-10, 0}, {10, 0}, {-20, 0}, {20, 0}};
  for (auto* fn : {&greedy_restore, &localized_restore}) {
    auto plan = (*fn)(s, 0, 1);
    ASSERT_EQ(plan.moves.size(), 2u);
    EXPECT_EQ(plan.moves[0].node, 1);
    EXPECT_EQ(plan.moves[1].node, 3);
    EXPECT_NEAR(plan.total_cost, 20.0, 1e-12);
  }
}

TEST(ChainBaselines, BudgetExhaustionIsReported) {
  // a 6-ring minus one node can never be 2-connected again
  Snapshot s;
  s.range = 11;
  for (int i = 0; i < 6; ++i) {
    s.ids.push_back(i);
    s.pos.push_back({10 * std::cos(i * M_PI / 3), 10 * std::sin(i * M_PI / 3)});
  }
  ASSERT_EQ(vertex_connectivity(s.graph()).kappa, 2);
  EXPECT_THROW(greedy_restore(s, 0, 2), RestorationInfeasible);
  EXPECT_THROW(localized_restore(s, 0, 2), RestorationInfeasible);
}

TEST(ChainBaselines, NeverBeatMccrAndRestoreOrReport) {
  int restored = 0, infeasible = 0;
  for (const auto& in : instances(100, 9, 3000)) {
    const double best = mccr_restore(in.s, in.failed, in.k).total_cost;
    for (auto* fn : {&greedy_restore, &localized_restore}) {
      try {
        auto plan = (*fn)(in.s, in.failed, in.k);
        EXPECT_GE(plan.total_cost, best - 1e-9);
        expect_restores(in, plan);
        ++restored;
      } catch (const RestorationInfeasible&) {
        ++infeasible;
      }
    }
  }
  EXPECT_GT(restored, 100);
}

TEST(Basic, DepotToVacancy) {
  Topology t = generate(20, 2, {200, 200}, 20, 6);
  t.nodes[5] = {100, 100};
  Snapshot s = snapshot_of(t);
  SparePool pool({0, 0}, 2, 20);
  auto plan = pool.restore(s, 5);
  ASSERT_EQ(plan.moves.size(), 1u);
  EXPECT_EQ(plan.moves[0].node, 20);
  EXPECT_NEAR(plan.total_cost, std::hypot(100.0, 100.0), 1e-12);
  Snapshot after = apply_plan(s, 5, plan);
  EXPECT_EQ(vertex_connectivity(after.graph()).kappa, vertex_connectivity(s.graph()).kappa);
  pool.restore(after, 3);
  EXPECT_THROW(pool.restore(after, 4), RestorationInfeasible);
}

TEST(BruteForce, OptimalityAndLimits) {
  for (const auto& in : instances(30, 9, 4000)) {
    auto opt = brute_force_optimal(in.s, in.failed, in.k, static_cast<int>(in.s.size()));
    EXPECT_NEAR(opt.total_cost, mccr_restore(in.s, in.failed, in.k).total_cost, 1e-9);
    expect_restores(in, opt);
    if (is_k_connected(in.s.without(in.failed).graph(), in.k)) {
      EXPECT_EQ(opt.total_cost, 0.0);
    }
    for (auto* fn : {&greedy_restore, &localized_restore}) {
      try {
        EXPECT_LE(opt.total_cost, (*fn)(in.s, in.failed, in.k).total_cost + 1e-9);
      } catch (const RestorationInfeasible&) {
      }
    }
    // a tighter move budget can only cost more
    try {
      EXPECT_GE(brute_force_optimal(in.s, in.failed, in.k, 1).total_cost, opt.total_cost - 1e-9);
    } catch (const RestorationInfeasible&) {
    }
  }
  Topology big = generate(11, 1, {80, 80}, 20, 1);
  EXPECT_THROW(brute_force_optimal(snapshot_of(big), 0, 1, 3), std::domain_error);
}

TEST(CentralLedger, ReportsExceedBasicCommand) {
  Topology t = generate(30, 2, {200, 200}, 20, 2);
  Snapshot s = snapshot_of(t);
  ByteLedger central(30), basic(30);
  central_ledger(s.without(7), mccr_restore(s, 7, 2), central);
  basic_ledger(s.without(7), basic);
  EXPECT_EQ(basic.total_messages(), 1u);
  EXPECT_EQ(basic.count(MessageKind::Command), 1u);
  EXPECT_GT(central.total_bytes(), basic.total_bytes());
  EXPECT_GE(central.count(MessageKind::Report), 28u);  // every non-sink node reports at least once
}

TEST(CentralLedger, HopCountsOnAPath) {
  // P5 with the sink at id 0: node i's report takes i hops
  Snapshot s;
  s.range = 10;
  s.ids = {0, 1, 2, 3, 4};
  for (int i = 0; i < 5; ++i) s.pos.push_back({10.0 * i, 0});
  RestorationPlan plan;
  plan.moves.push_back({4, {40, 0}, {45, 0}});
  ByteLedger l(5);
  central_ledger(s, plan, l);
  EXPECT_EQ(l.count(MessageKind::Report), 1u + 2u + 3u + 4u);
  EXPECT_EQ(l.count(MessageKind::Command), 4u);
  Message c;
  c.kind = MessageKind::Command;
  EXPECT_EQ(l.bytes(MessageKind::Command), 4u * c.wire_size());
}
