#include "gfev/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "gfev/io.hpp"

namespace gfev {

void Graph::validate() const {
  if (n <= 0) fail(ErrorCode::invalid_argument, "graph must be nonempty");
  for (const auto& e : edges) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
      fail(ErrorCode::invalid_argument, "edge endpoint out of range");
    if (e.i == e.j) fail(ErrorCode::invalid_argument, "self-loop in edge list");
  }
}

std::vector<std::vector<int>> Graph::neighbor_lists() const {
  std::vector<std::set<int>> nb(n);
  for (const auto& e : edges) {
    nb[e.i].insert(e.j);
    nb[e.j].insert(e.i);
  }
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) out[i].assign(nb[i].begin(), nb[i].end());
  return out;
}

MatX<double> Graph::adjacency() const {
  MatX<double> w = MatX<double>::Zero(n, n);
  for (const auto& e : edges) {
    w(e.i, e.j) = e.w;
    if (!directed) w(e.j, e.i) = e.w;
  }
  return w;
}

VecX<double> Graph::degrees() const { return adjacency().rowwise().sum(); }

bool Graph::connected() const {
  if (n == 0) return false;
  auto nb = neighbor_lists();
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int u : nb[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push(u);
      }
  }
  return count == n;
}

Graph ring_graph(int n) {
  if (n < 3) fail(ErrorCode::invalid_argument, "ring needs n >= 3");
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, 1.0});
  return g;
}

Graph path_graph(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "path needs n >= 2");
  Graph g;
  g.n = n;
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  return g;
}

Graph grid_graph(int rows, int cols) {
  if (rows < 1 || cols < 1)
    fail(ErrorCode::invalid_argument, "grid needs positive dimensions");
  Graph g;
  g.n = rows * cols;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.edges.push_back({id(r, c), id(r, c + 1), 1.0});
      if (r + 1 < rows) g.edges.push_back({id(r, c), id(r + 1, c), 1.0});
    }
  return g;
}

Graph star_graph(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "star needs n >= 2");
  Graph g;
  g.n = n;
  for (int i = 1; i < n; ++i) g.edges.push_back({0, i, 1.0});
  return g;
}

Graph complete_graph(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "complete needs n >= 2");
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.edges.push_back({i, j, 1.0});
  return g;
}

Graph random_community_graph(int n, int clusters, double p_in, double p_out,
                             std::uint64_t seed, int max_retries) {
  if (n <= 0 || clusters <= 0 || clusters > n)
    fail(ErrorCode::invalid_argument, "bad community graph size");
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0))
    fail(ErrorCode::invalid_argument, "need 0 <= p_out <= p_in <= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    Graph g;
    g.n = n;
    auto cluster_of = [&](int v) { return v % clusters; };
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double p = cluster_of(i) == cluster_of(j) ? p_in : p_out;
        if (unif(rng) < p) g.edges.push_back({i, j, 1.0});
      }
    if (g.connected()) return g;
  }
  fail(ErrorCode::degenerate_input,
       "could not generate a connected community graph within retry budget");
}

Graph knn_geometric_graph(const std::vector<std::array<double, 2>>& points,
                          int k) {
  int n = static_cast<int>(points.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "knn needs >= 2 points");
  if (k < 1 || k >= n) fail(ErrorCode::invalid_argument, "need 1 <= k < n");
  std::set<std::pair<int, int>> picked;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> dist;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double dx = points[i][0] - points[j][0];
      double dy = points[i][1] - points[j][1];
      dist.push_back({dx * dx + dy * dy, j});
    }
    std::sort(dist.begin(), dist.end());
    for (int m = 0; m < k; ++m) {
      int j = dist[m].second;
      picked.insert({std::min(i, j), std::max(i, j)});
    }
  }
  Graph g;
  g.n = n;
  g.coordinates = points;
  for (const auto& [i, j] : picked) g.edges.push_back({i, j, 1.0});
  return g;
}

Graph random_geometric_knn_graph(int n, int k, double side,
                                 std::uint64_t seed) {
  if (n < 2 || k < 1 || k >= n)
    fail(ErrorCode::invalid_argument, "bad geometric knn parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, side);
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::vector<std::array<double, 2>> pts(n);
    for (auto& p : pts) p = {unif(rng), unif(rng)};
    Graph g = knn_geometric_graph(pts, k);
    if (g.connected()) return g;
  }
  fail(ErrorCode::degenerate_input,
       "could not generate a connected knn graph within retry budget");
}

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  Graph g;
  int max_idx = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      while (hs >> key) {
        if (key == "n") hs >> g.n;
        if (key == "directed") {
          int d = 0;
          hs >> d;
          g.directed = d != 0;
        }
      }
      continue;
    }
    std::istringstream ls(line);
    Graph::Edge e;
    if (!(ls >> e.i >> e.j >> e.w))
      fail(ErrorCode::io_error, "malformed edge line: " + line);
    g.edges.push_back(e);
    max_idx = std::max({max_idx, e.i, e.j});
  }
  if (g.n == 0) g.n = max_idx + 1;
  g.validate();
  return g;
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path);
  out << "# n " << g.n << " directed " << (g.directed ? 1 : 0) << "\n";
  for (const auto& e : g.edges)
    out << e.i << "\t" << e.j << "\t" << format_number(e.w) << "\n";
}

}  // namespace gfev
