#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netinfer {

// Immutable undirected graph over dense node indices 0..N-1.
// No self-loops, no parallel edges; construction collapses duplicates.
// Optional string labels preserve the node identities of data read from
// edge-list files. Instances are safe to share across threads.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  UndirectedGraph(int node_count, const std::vector<std::pair<int, int>>& edges,
                  std::vector<std::string> labels = {});

  static UndirectedGraph complete(int node_count);

  int node_count() const { return n_; }
  std::int64_t edge_count() const { return m_; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  bool has_edge(int u, int v) const;

  // All edges as (u, v) with u < v, sorted lexicographically.
  std::vector<std::pair<int, int>> edges() const;

  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  // Structural equality; labels are not compared.
  friend bool operator==(const UndirectedGraph& a, const UndirectedGraph& b) {
    return a.n_ == b.n_ && a.adj_ == b.adj_;
  }

 private:
  int n_ = 0;
  std::int64_t m_ = 0;
  std::vector<std::vector<int>> adj_;  // sorted neighbor lists
  std::vector<std::string> labels_;
};

struct GraphStats {
  int size = 0;
  double density = 0.0;
  double transitivity = 0.0;
  std::int64_t n_maximal_cliques = 0;
};

// |E| / C(N,2); zero for N < 2.
double density(const UndirectedGraph& g);

// Global transitivity: 3 * triangles / connected triples; zero when the
// graph has no connected triple. Exact integer counting.
double transitivity(const UndirectedGraph& g);

// All maximal cliques, Bron-Kerbosch with pivoting. Each clique is sorted
// ascending and the list is sorted lexicographically, so the result is a
// canonical function of the graph. Isolated nodes appear as 1-cliques.
std::vector<std::vector<int>> maximal_cliques(const UndirectedGraph& g);

// Reported clique count is the number of maximal cliques.
GraphStats graph_stats(const UndirectedGraph& g);

// Edge-list text format: one edge per line, two whitespace-separated node
// labels; lines beginning with '#' are comments. The special comment
// "# node <label>" declares a node without edges, so graphs with isolated
// nodes survive a save/load round trip. Labels map to dense indices in
// first-appearance order.
UndirectedGraph load_edge_list(std::string_view text);
std::string save_edge_list(const UndirectedGraph& g);

UndirectedGraph read_edge_list_file(const std::filesystem::path& path);
void write_edge_list_file(const UndirectedGraph& g, const std::filesystem::path& path);

}  // namespace netinfer
