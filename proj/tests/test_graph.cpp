#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <set>

#include "gfev/graph.hpp"

using namespace gfev;

TEST_CASE("ring graph structure") {
  Graph g = ring_graph(6);
  CHECK(g.n == 6);
  CHECK(g.edge_count() == 6);
  CHECK(g.connected());
  auto nbrs = g.neighbor_lists();
  for (int i = 0; i < 6; ++i) CHECK(nbrs[i].size() == 2);
}

TEST_CASE("path, star, complete, grid sizes") {
  CHECK(path_graph(5).edge_count() == 4);
  CHECK(star_graph(5).edge_count() == 4);
  CHECK(complete_graph(5).edge_count() == 10);
  CHECK(grid_graph(3, 4).edge_count() == 3 * 3 + 2 * 4);
  CHECK(grid_graph(3, 4).n == 12);
  CHECK(star_graph(5).connected());
}

TEST_CASE("generator argument validation") {
  CHECK_THROWS_AS(ring_graph(0), Error);
  CHECK_THROWS_AS(complete_graph(-2), Error);
  CHECK_THROWS_AS(random_community_graph(10, 0, 0.5, 0.1, 1), Error);
  CHECK_THROWS_AS(random_community_graph(10, 2, 1.5, 0.1, 1), Error);
  CHECK_THROWS_AS(random_geometric_knn_graph(10, 0, 1.0, 1), Error);
}

TEST_CASE("community generator is deterministic and connected") {
  Graph a = random_community_graph(32, 4, 0.7, 0.05, 42);
  Graph b = random_community_graph(32, 4, 0.7, 0.05, 42);
  REQUIRE(a.edge_count() == b.edge_count());
  for (int e = 0; e < a.edge_count(); ++e) {
    CHECK(a.edges[e].i == b.edges[e].i);
    CHECK(a.edges[e].j == b.edges[e].j);
  }
  CHECK(a.connected());
  Graph c = random_community_graph(32, 4, 0.7, 0.05, 43);
  bool same = a.edge_count() == c.edge_count();
  if (same)
    for (int e = 0; e < a.edge_count(); ++e)
      same = same && a.edges[e].i == c.edges[e].i && a.edges[e].j == c.edges[e].j;
  CHECK_FALSE(same);
}

TEST_CASE("knn graph is symmetric with at least k neighbors") {
  Graph g = random_geometric_knn_graph(40, 8, 1.0, 7);
  CHECK(g.n == 40);
  CHECK(g.coordinates.size() == 40);
  auto nbrs = g.neighbor_lists();
  std::set<std::pair<int, int>> edges;
  for (const auto& e : g.edges) {
    CHECK(e.i != e.j);
    edges.insert({std::min(e.i, e.j), std::max(e.i, e.j)});
  }
  CHECK(edges.size() == static_cast<size_t>(g.edge_count()));  // no duplicates
  for (int i = 0; i < g.n; ++i) CHECK(nbrs[i].size() >= 8);    // symmetrized
}

TEST_CASE("adjacency and degrees") {
  Graph g = star_graph(4);
  MatX<double> a = g.adjacency();
  CHECK(a(0, 1) == 1.0);
  CHECK(a(1, 0) == 1.0);
  CHECK(a(1, 2) == 0.0);
  CHECK(g.degrees()(0) == doctest::Approx(3.0));
  CHECK(g.degrees()(1) == doctest::Approx(1.0));
}

TEST_CASE("edge list round trip") {
  Graph g = random_community_graph(20, 2, 0.6, 0.1, 3);
  std::string path = "test_graph_roundtrip.tsv";
  write_edge_list(g, path);
  Graph h = read_edge_list(path);
  REQUIRE(h.n == g.n);
  REQUIRE(h.edge_count() == g.edge_count());
  CHECK((h.adjacency() - g.adjacency()).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("disconnected graph detected") {
  Graph g;
  g.n = 4;
  g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  g.validate();
  CHECK_FALSE(g.connected());
}
