#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netinfer/graph.hpp"
#include "netinfer/rng.hpp"

namespace netinfer {

enum class NetworkKind {
  random,
  small_world,
  scale_free,
  caveman,
  core_periphery,
  dolphin,
  florentine,
  karate,
  law,
  tailor,
};

const char* kind_token(NetworkKind kind);
NetworkKind parse_kind(std::string_view token);
bool kind_is_empirical(NetworkKind kind);

// One unobserved-network specification. Synthetic kinds carry their model
// parameters (defaults are the experimental settings); empirical kinds
// ignore them and load a bundled dataset.
struct NetworkSpec {
  NetworkKind kind = NetworkKind::random;

  int n = 50;               // random / small_world / scale_free
  double edge_prob = 0.08;  // random
  int lattice_neighbors = 4;
  double rewire_prob = 0.05;
  int edges_per_step = 2;
  int n_cliques = 10;
  int clique_size = 5;
  bool connected_caves = false;
  int core_n = 10;
  int periph_n = 40;
  double core_density = 0.85;

  std::string name() const { return kind_token(kind); }
  bool is_empirical() const { return kind_is_empirical(kind); }
  int nominal_node_count() const;
  void validate() const;

  // Catalog entry by kind token, with default parameters.
  static NetworkSpec named(std::string_view token);
};

// Erdos-Renyi G(n, p): every dyad is an edge independently with probability p.
UndirectedGraph gen_random(int n, double p, Rng& rng);

// Watts-Strogatz: ring lattice with k nearest neighbors, each edge rewired
// with probability beta (first endpoint kept, new endpoint uniform among
// non-neighbors). Edge count is preserved at n*k/2.
UndirectedGraph gen_small_world(int n, int k, double beta, Rng& rng);

// Barabasi-Albert preferential attachment with m edges per arriving node.
// Seed graph is the complete graph on m+1 nodes.
UndirectedGraph gen_scale_free(int n, int m, Rng& rng);

// Disjoint union of n_cliques complete graphs of clique_size nodes each.
// The connected variant relinks one edge per cave to the previous cave,
// preserving the edge count (requires clique_size >= 3).
UndirectedGraph gen_caveman(int n_cliques, int clique_size, bool connected = false);

// Dense core (dyad probability core_density) plus periphery nodes attached
// to 1 or 2 distinct core nodes (equal probability); no periphery-periphery
// edges.
UndirectedGraph gen_core_periphery(int core_n, int periph_n, double core_density, Rng& rng);

struct DatasetInfo {
  std::string name;
  int nodes = 0;
  std::int64_t edges = 0;
  std::uint64_t checksum = 0;  // FNV-1a 64 over the raw file bytes
  std::string note;
};

// Resolution order: explicit argument, NETINFER_DATA_DIR environment
// variable, compiled-in default (the repository's data/ directory).
std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir = {});

std::vector<DatasetInfo> read_manifest(const std::filesystem::path& data_dir);

// Loads a bundled empirical network, checking the manifest's node count,
// edge count and checksum. Throws ValidationError naming the dataset when
// the file is missing or corrupt.
UndirectedGraph load_empirical(NetworkKind kind,
                               const std::optional<std::filesystem::path>& data_dir = {});

UndirectedGraph make_network(const NetworkSpec& spec, Rng& rng,
                             const std::optional<std::filesystem::path>& data_dir = {});

}  // namespace netinfer
