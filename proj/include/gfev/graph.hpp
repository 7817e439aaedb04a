#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gfev/common.hpp"

namespace gfev {

/// Undirected graphs store each edge once (i < j canonically) and expose a
/// symmetric adjacency; directed graphs interpret (i, j, w) as j -> i flow,
/// matching the adjacency convention W[i][j] != 0 iff (v_j, v_i) is an edge.
struct Graph {
  struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;
  };

  int n = 0;
  std::vector<Edge> edges;
  bool directed = false;
  std::vector<std::array<double, 2>> coordinates;  // empty unless geometric

  int edge_count() const { return static_cast<int>(edges.size()); }

  void validate() const;

  // Sorted neighbor lists (union of in/out neighbors for directed graphs).
  std::vector<std::vector<int>> neighbor_lists() const;

  MatX<double> adjacency() const;
  VecX<double> degrees() const;  // weighted degree (adjacency row sums)
  bool connected() const;
};

// Deterministic generators. All throw Error(invalid_argument) on bad
// parameters and Error(degenerate_input) if the retry budget is exhausted
// without producing a connected graph.
Graph ring_graph(int n);
Graph path_graph(int n);
Graph grid_graph(int rows, int cols);
Graph star_graph(int n);
Graph complete_graph(int n);
Graph random_community_graph(int n, int clusters, double p_in, double p_out,
                             std::uint64_t seed, int max_retries = 50);
Graph knn_geometric_graph(const std::vector<std::array<double, 2>>& points,
                          int k);
Graph random_geometric_knn_graph(int n, int k, double side,
                                 std::uint64_t seed);

// Edge-list TSV ("i<TAB>j<TAB>weight", '#' comments; header line
// "# n <N> directed <0|1>" carries the vertex count).
Graph read_edge_list(const std::string& path);
void write_edge_list(const Graph& g, const std::string& path);

}  // namespace gfev
