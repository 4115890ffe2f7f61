#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "linar/connectivity.hpp"
#include "linar/topology.hpp"

using namespace linar;

TEST(Geometry, EuclideanCost) {
  EXPECT_EQ(euclidean_cost({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(euclidean_cost({0, 0}, {3, 4}), 5.0);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    Position a{unit_uniform(rng) * 1000, unit_uniform(rng) * 1000};
    Position b{unit_uniform(rng) * 1000, unit_uniform(rng) * 1000};
    long double dx = static_cast<long double>(a.x) - b.x, dy = static_cast<long double>(a.y) - b.y;
    long double ref = std::sqrt(dx * dx + dy * dy);
    EXPECT_NEAR(euclidean_cost(a, b), static_cast<double>(ref), 1e-12 * std::max(1.0L, ref));
  }
}

TEST(Generate, ReachesExactTargetKappa) {
  for (int k = 1; k <= 4; ++k)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Topology t = generate(30, k, {200, 200}, 20, seed);
      ASSERT_EQ(t.size(), 30u);
      EXPECT_EQ(vertex_connectivity(to_graph(t)).kappa, k) << "k=" << k << " seed=" << seed;
      for (const auto& p : t.nodes) EXPECT_TRUE(t.field.contains(p));
    }
}

TEST(Generate, LargeFieldExample) {
  Topology t = generate(50, 2, {1000, 1000}, 20, 7);
  EXPECT_EQ(vertex_connectivity(to_graph(t)).kappa, 2);
}

TEST(Generate, TriangleOnTinyField) {
  Topology t = generate(3, 2, {1, 1}, 50, 3);
  Graph g = to_graph(t);
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_EQ(vertex_connectivity(g).kappa, 2);
}

TEST(Generate, DeterministicAndSeedSensitive) {
  EXPECT_EQ(generate(25, 2, {200, 200}, 20, 42), generate(25, 2, {200, 200}, 20, 42));
  EXPECT_NE(generate(25, 2, {200, 200}, 20, 42).nodes, generate(25, 2, {200, 200}, 20, 43).nodes);
}

TEST(Generate, RejectsBadParameters) {
  EXPECT_THROW(generate(2, 2, {200, 200}, 20, 1), std::domain_error);
  EXPECT_THROW(generate(10, 0, {200, 200}, 20, 1), std::domain_error);
  EXPECT_THROW(generate(10, 2, {200, 200}, 0, 1), std::domain_error);
  GenerateOptions few;
  few.max_attempts = 0;
  try {
    generate(3, 2, {1000, 1000}, 20, 1, few);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("n=3"), std::string::npos);
  }
}

TEST(Generate, EdgesMatchDistances) {
  Topology t = generate(40, 3, {200, 200}, 20, 9);
  Graph g = to_graph(t);
  for (NodeId a = 0; a < 40; ++a)
    for (NodeId b = a + 1; b < 40; ++b) {
      const double dx = t.nodes[a].x - t.nodes[b].x, dy = t.nodes[a].y - t.nodes[b].y;
      EXPECT_EQ(g.has_edge(a, b), dx * dx + dy * dy <= 400.0);
    }
}

TEST(TopologyFile, RoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Topology t = generate(35, 2, {200, 200}, 20, seed);
    std::stringstream ss;
    write_topology(ss, t);
    Topology back = read_topology(ss);
    EXPECT_EQ(back, t);
    EXPECT_EQ(to_graph(back), to_graph(t));
  }
}

TEST(TopologyFile, RejectsDuplicatesAndOutOfField) {
  const std::string head = "field 100 100\nrange 20\nk 1\n";
  {
    std::istringstream is(head + "node 0 1 1\nnode 0 2 2\n");
    EXPECT_THROW(read_topology(is), TopologyParseError);
  }
  {
    std::istringstream is(head + "node 0 101 5\n");
    EXPECT_THROW(read_topology(is), TopologyParseError);
  }
  {
    std::istringstream is(head + "node 0 1 1\nnode 2 3 3\n");  // gap in ids
    EXPECT_THROW(read_topology(is), TopologyParseError);
  }
}

TEST(TopologyFile, ErrorsCarryLineAndColumn) {
  std::istringstream is("field 100 100\nrange 20\nk 1\nnode 0 1 abc\n");
  try {
    read_topology(is);
    FAIL();
  } catch (const TopologyParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 10);
  }
}

TEST(TopologyFile, SensingDefaultsToRange) {
  std::istringstream is("field 100 100\nrange 15\nk 1\nnode 0 1 1\nnode 1 5 5\n");
  Topology t = read_topology(is);
  EXPECT_EQ(t.sensing_range, 15.0);
  EXPECT_EQ(t.size(), 2u);
}
