#include "netinfer/generators.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "netinfer/errors.hpp"

#ifndef NETINFER_DEFAULT_DATA_DIR
#define NETINFER_DEFAULT_DATA_DIR "data"
#endif

namespace netinfer {

const char* kind_token(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::random: return "random";
    case NetworkKind::small_world: return "small_world";
    case NetworkKind::scale_free: return "scale_free";
    case NetworkKind::caveman: return "caveman";
    case NetworkKind::core_periphery: return "core_periphery";
    case NetworkKind::dolphin: return "dolphin";
    case NetworkKind::florentine: return "florentine";
    case NetworkKind::karate: return "karate";
    case NetworkKind::law: return "law";
    case NetworkKind::tailor: return "tailor";
  }
  return "?";
}

NetworkKind parse_kind(std::string_view token) {
  for (NetworkKind k :
       {NetworkKind::random, NetworkKind::small_world, NetworkKind::scale_free,
        NetworkKind::caveman, NetworkKind::core_periphery, NetworkKind::dolphin,
        NetworkKind::florentine, NetworkKind::karate, NetworkKind::law, NetworkKind::tailor}) {
    if (token == kind_token(k)) return k;
  }
  throw ValidationError("unknown network kind: '" + std::string(token) + "'");
}

bool kind_is_empirical(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::dolphin:
    case NetworkKind::florentine:
    case NetworkKind::karate:
    case NetworkKind::law:
    case NetworkKind::tailor:
      return true;
    default:
      return false;
  }
}

namespace {

int empirical_node_count(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::dolphin: return 62;
    case NetworkKind::florentine: return 15;
    case NetworkKind::karate: return 34;
    case NetworkKind::law: return 71;
    case NetworkKind::tailor: return 32;
    default: return 0;
  }
}

}  // namespace

int NetworkSpec::nominal_node_count() const {
  switch (kind) {
    case NetworkKind::random:
    case NetworkKind::small_world:
    case NetworkKind::scale_free:
      return n;
    case NetworkKind::caveman:
      return n_cliques * clique_size;
    case NetworkKind::core_periphery:
      return core_n + periph_n;
    default:
      return empirical_node_count(kind);
  }
}

void NetworkSpec::validate() const {
  switch (kind) {
    case NetworkKind::random:
      if (n < 1) throw ValidationError("random: n must be >= 1");
      if (edge_prob < 0.0 || edge_prob > 1.0)
        throw ValidationError("random: edge probability must lie in [0,1]");
      break;
    case NetworkKind::small_world:
      if (lattice_neighbors < 0 || lattice_neighbors % 2 != 0)
        throw ValidationError("small_world: k must be even and nonnegative");
      if (n <= lattice_neighbors) throw ValidationError("small_world: requires n > k");
      if (rewire_prob < 0.0 || rewire_prob > 1.0)
        throw ValidationError("small_world: rewire probability must lie in [0,1]");
      break;
    case NetworkKind::scale_free:
      if (edges_per_step < 1) throw ValidationError("scale_free: m must be >= 1");
      if (n <= edges_per_step) throw ValidationError("scale_free: requires n > m");
      break;
    case NetworkKind::caveman:
      if (n_cliques < 1) throw ValidationError("caveman: clique count must be >= 1");
      if (clique_size < 2) throw ValidationError("caveman: clique size must be >= 2");
      if (connected_caves && clique_size < 3)
        throw ValidationError("caveman: connected variant requires clique size >= 3");
      break;
    case NetworkKind::core_periphery:
      if (core_n < 2) throw ValidationError("core_periphery: core size must be >= 2");
      if (periph_n < 0) throw ValidationError("core_periphery: periphery size must be >= 0");
      if (core_density < 0.0 || core_density > 1.0)
        throw ValidationError("core_periphery: core density must lie in [0,1]");
      break;
    default:
      break;  // empirical kinds carry no parameters
  }
}

NetworkSpec NetworkSpec::named(std::string_view token) {
  NetworkSpec spec;
  spec.kind = parse_kind(token);
  // The caveman catalog entry is the connected (Watts) variant; it keeps the
  // edge count at 100 and reproduces the reported caveman inference accuracy.
  // The bare gen_caveman() operation still defaults to disjoint caves.
  if (spec.kind == NetworkKind::caveman) spec.connected_caves = true;
  return spec;
}

UndirectedGraph gen_random(int n, double p, Rng& rng) {
  if (n < 1) throw ValidationError("gen_random: n must be >= 1");
  if (p < 0.0 || p > 1.0) throw ValidationError("gen_random: p must lie in [0,1]");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return UndirectedGraph(n, edges);
}

UndirectedGraph gen_small_world(int n, int k, double beta, Rng& rng) {
  if (k < 0 || k % 2 != 0) throw ValidationError("gen_small_world: k must be even");
  if (n <= k) throw ValidationError("gen_small_world: requires n > k");
  if (beta < 0.0 || beta > 1.0) throw ValidationError("gen_small_world: beta must lie in [0,1]");

  std::vector<std::unordered_set<int>> adj(n);
  std::vector<std::pair<int, int>> lattice;
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j <= k / 2; ++j) {
      const int v = (i + j) % n;
      lattice.emplace_back(i, v);
      adj[i].insert(v);
      adj[v].insert(i);
    }
  }
  // Rewire pass over lattice edges in construction order.
  for (auto [u, v] : lattice) {
    if (!rng.bernoulli(beta)) continue;
    if (static_cast<int>(adj[u].size()) >= n - 1) continue;  // no candidate endpoint
    int w;
    do {
      w = rng.int_below(n);
    } while (w == u || adj[u].count(w) != 0);
    adj[u].erase(v);
    adj[v].erase(u);
    adj[u].insert(w);
    adj[w].insert(u);
  }
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  return UndirectedGraph(n, edges);
}

UndirectedGraph gen_scale_free(int n, int m, Rng& rng) {
  if (m < 1) throw ValidationError("gen_scale_free: m must be >= 1");
  if (n <= m) throw ValidationError("gen_scale_free: requires n > m");

  std::vector<std::pair<int, int>> edges;
  std::vector<int> stubs;  // one entry per edge endpoint; sampling is degree-proportional
  const int seed_n = m + 1;
  for (int i = 0; i < seed_n; ++i) {
    for (int j = i + 1; j < seed_n; ++j) {
      edges.emplace_back(i, j);
      stubs.push_back(i);
      stubs.push_back(j);
    }
  }
  std::vector<int> targets;
  for (int v = seed_n; v < n; ++v) {
    targets.clear();
    while (static_cast<int>(targets.size()) < m) {
      const int t = stubs[rng.below(stubs.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (int t : targets) {
      edges.emplace_back(v, t);
      stubs.push_back(v);
      stubs.push_back(t);
    }
  }
  return UndirectedGraph(n, edges);
}

UndirectedGraph gen_caveman(int n_cliques, int clique_size, bool connected) {
  if (n_cliques < 1) throw ValidationError("gen_caveman: clique count must be >= 1");
  if (clique_size < 2) throw ValidationError("gen_caveman: clique size must be >= 2");
  if (connected && clique_size < 3)
    throw ValidationError("gen_caveman: connected variant requires clique size >= 3");

  const int n = n_cliques * clique_size;
  std::vector<std::pair<int, int>> edges;
  for (int c = 0; c < n_cliques; ++c) {
    const int base = c * clique_size;
    for (int i = 0; i < clique_size; ++i)
      for (int j = i + 1; j < clique_size; ++j) edges.emplace_back(base + i, base + j);
  }
  if (connected && n_cliques > 1) {
    // Per cave: drop one internal edge and link to the previous cave instead.
    std::vector<std::pair<int, int>> kept;
    for (auto e : edges) {
      bool drop = false;
      for (int c = 0; c < n_cliques; ++c) {
        const int base = c * clique_size;
        if (e.first == base && e.second == base + 1) drop = true;
      }
      if (!drop) kept.push_back(e);
    }
    for (int c = 0; c < n_cliques; ++c) {
      const int base = c * clique_size;
      kept.emplace_back(base, (base - 1 + n) % n);
    }
    edges = std::move(kept);
  }
  return UndirectedGraph(n, edges);
}

UndirectedGraph gen_core_periphery(int core_n, int periph_n, double core_density, Rng& rng) {
  if (core_n < 2) throw ValidationError("gen_core_periphery: core size must be >= 2");
  if (periph_n < 0) throw ValidationError("gen_core_periphery: periphery size must be >= 0");
  if (core_density < 0.0 || core_density > 1.0)
    throw ValidationError("gen_core_periphery: core density must lie in [0,1]");

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < core_n; ++i)
    for (int j = i + 1; j < core_n; ++j)
      if (rng.bernoulli(core_density)) edges.emplace_back(i, j);
  for (int u = core_n; u < core_n + periph_n; ++u) {
    const int links = rng.bernoulli(0.5) ? 2 : 1;
    const int first = rng.int_below(core_n);
    edges.emplace_back(u, first);
    if (links == 2) {
      int second;
      do {
        second = rng.int_below(core_n);
      } while (second == first);
      edges.emplace_back(u, second);
    }
  }
  return UndirectedGraph(core_n + periph_n, edges);
}

namespace {

std::uint64_t fnv1a64_bytes(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir) {
  if (explicit_dir) return *explicit_dir;
  if (const char* env = std::getenv("NETINFER_DATA_DIR"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(NETINFER_DEFAULT_DATA_DIR);
}

std::vector<DatasetInfo> read_manifest(const std::filesystem::path& data_dir) {
  const auto path = data_dir / "manifest.tsv";
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset manifest: " + path.string());
  std::vector<DatasetInfo> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 5)
      throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                       ": expected 5 tab-separated fields");
    DatasetInfo info;
    info.name = fields[0];
    info.nodes = std::stoi(fields[1]);
    info.edges = std::stoll(fields[2]);
    info.checksum = std::stoull(fields[3], nullptr, 16);
    info.note = fields[4];
    out.push_back(std::move(info));
  }
  return out;
}

UndirectedGraph load_empirical(NetworkKind kind,
                               const std::optional<std::filesystem::path>& data_dir) {
  if (!kind_is_empirical(kind))
    throw ValidationError(std::string("not an empirical network kind: ") + kind_token(kind));
  const std::string name = kind_token(kind);
  const auto dir = resolve_data_dir(data_dir);

  DatasetInfo info;
  bool found = false;
  for (const auto& entry : read_manifest(dir)) {
    if (entry.name == name) {
      info = entry;
      found = true;
      break;
    }
  }
  if (!found) throw ValidationError("dataset '" + name + "': not listed in manifest " +
                                    (dir / "manifest.tsv").string());

  const auto path = dir / (name + ".edges");
  std::string bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const ValidationError&) {
    throw ValidationError("dataset '" + name + "': missing file " + path.string());
  }
  if (fnv1a64_bytes(bytes) != info.checksum)
    throw ValidationError("dataset '" + name + "': checksum mismatch for " + path.string());

  UndirectedGraph g;
  try {
    g = load_edge_list(bytes);
  } catch (const ValidationError& e) {
    throw ValidationError("dataset '" + name + "': " + e.what());
  }
  if (g.node_count() != info.nodes || g.edge_count() != info.edges)
    throw ValidationError("dataset '" + name + "': node/edge counts disagree with manifest");
  if (g.node_count() != empirical_node_count(kind))
    throw ValidationError("dataset '" + name + "': unexpected node count");
  return g;
}

UndirectedGraph make_network(const NetworkSpec& spec, Rng& rng,
                             const std::optional<std::filesystem::path>& data_dir) {
  spec.validate();
  switch (spec.kind) {
    case NetworkKind::random:
      return gen_random(spec.n, spec.edge_prob, rng);
    case NetworkKind::small_world:
      return gen_small_world(spec.n, spec.lattice_neighbors, spec.rewire_prob, rng);
    case NetworkKind::scale_free:
      return gen_scale_free(spec.n, spec.edges_per_step, rng);
    case NetworkKind::caveman:
      return gen_caveman(spec.n_cliques, spec.clique_size, spec.connected_caves);
    case NetworkKind::core_periphery:
      return gen_core_periphery(spec.core_n, spec.periph_n, spec.core_density, rng);
    default:
      return load_empirical(spec.kind, data_dir);
  }
}

}  // namespace netinfer
