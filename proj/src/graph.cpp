#include "netinfer/graph.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "netinfer/errors.hpp"

namespace netinfer {

UndirectedGraph::UndirectedGraph(int node_count, const std::vector<std::pair<int, int>>& edges,
                                 std::vector<std::string> labels)
    : n_(node_count), labels_(std::move(labels)) {
  if (node_count < 0) throw ValidationError("node count must be nonnegative");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != node_count)
    throw ValidationError("label table size does not match node count");
  adj_.resize(n_);
  std::set<std::pair<int, int>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
      throw ValidationError("edge endpoint out of range [0, N)");
    if (u == v) throw ValidationError("self-loops are not allowed");
    if (u > v) std::swap(u, v);
    if (!seen.insert({u, v}).second) continue;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  m_ = static_cast<std::int64_t>(seen.size());
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

UndirectedGraph UndirectedGraph::complete(int node_count) {
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) es.emplace_back(i, j);
  return UndirectedGraph(node_count, es);
}

bool UndirectedGraph::has_edge(int u, int v) const {
  if (u == v) return false;
  const auto& nb = adj_[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
  std::vector<std::pair<int, int>> es;
  es.reserve(static_cast<std::size_t>(m_));
  for (int u = 0; u < n_; ++u)
    for (int v : adj_[u])
      if (u < v) es.emplace_back(u, v);
  return es;
}

double density(const UndirectedGraph& g) {
  const int n = g.node_count();
  if (n < 2) return 0.0;
  const double dyads = 0.5 * n * (n - 1);
  return static_cast<double>(g.edge_count()) / dyads;
}

double transitivity(const UndirectedGraph& g) {
  const int n = g.node_count();
  std::int64_t triples = 0;
  for (int v = 0; v < n; ++v) {
    const std::int64_t d = g.degree(v);
    triples += d * (d - 1) / 2;
  }
  if (triples == 0) return 0.0;
  // Shared neighbors per edge; summed over edges this equals 3 * triangles.
  std::int64_t closed = 0;
  for (int u = 0; u < n; ++u) {
    for (int v : g.neighbors(u)) {
      if (v <= u) continue;
      const auto& a = g.neighbors(u);
      const auto& b = g.neighbors(v);
      std::size_t i = 0, j = 0;
      while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
          ++i;
        } else if (a[i] > b[j]) {
          ++j;
        } else {
          ++closed;
          ++i;
          ++j;
        }
      }
    }
  }
  return static_cast<double>(closed) / static_cast<double>(triples);
}

namespace {

using Words = std::vector<std::uint64_t>;

int popcount_and(const Words& a, const Words& b) {
  int c = 0;
  for (std::size_t w = 0; w < a.size(); ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

bool any_bit(const Words& a) {
  for (auto w : a)
    if (w) return true;
  return false;
}

void bron_kerbosch(const std::vector<Words>& adj, Words& p, Words& x, std::vector<int>& r,
                   std::vector<std::vector<int>>& out) {
  if (!any_bit(p) && !any_bit(x)) {
    out.push_back(r);
    return;
  }
  // Pivot: vertex of P union X with the most neighbors inside P.
  int pivot = -1, best = -1;
  for (std::size_t w = 0; w < p.size(); ++w) {
    std::uint64_t both = p[w] | x[w];
    while (both) {
      const int v = static_cast<int>(w * 64 + std::countr_zero(both));
      both &= both - 1;
      const int score = popcount_and(p, adj[v]);
      if (score > best) {
        best = score;
        pivot = v;
      }
    }
  }
  Words cand = p;
  for (std::size_t w = 0; w < cand.size(); ++w) cand[w] &= ~adj[pivot][w];
  for (std::size_t w = 0; w < cand.size(); ++w) {
    std::uint64_t bits = cand[w];
    while (bits) {
      const int v = static_cast<int>(w * 64 + std::countr_zero(bits));
      bits &= bits - 1;
      Words p2(p.size()), x2(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) {
        p2[k] = p[k] & adj[v][k];
        x2[k] = x[k] & adj[v][k];
      }
      r.push_back(v);
      bron_kerbosch(adj, p2, x2, r, out);
      r.pop_back();
      p[w] &= ~(1ULL << (v - static_cast<int>(w) * 64));
      x[w] |= 1ULL << (v - static_cast<int>(w) * 64);
    }
  }
}

}  // namespace

std::vector<std::vector<int>> maximal_cliques(const UndirectedGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> out;
  if (n == 0) return out;
  const std::size_t words = static_cast<std::size_t>(n + 63) / 64;
  std::vector<Words> adj(n, Words(words, 0));
  for (int u = 0; u < n; ++u)
    for (int v : g.neighbors(u)) adj[u][v / 64] |= 1ULL << (v % 64);
  Words p(words, 0), x(words, 0);
  for (int v = 0; v < n; ++v) p[v / 64] |= 1ULL << (v % 64);
  std::vector<int> r;
  bron_kerbosch(adj, p, x, r, out);
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end());
  return out;
}

GraphStats graph_stats(const UndirectedGraph& g) {
  GraphStats s;
  s.size = g.node_count();
  s.density = density(g);
  s.transitivity = transitivity(g);
  s.n_maximal_cliques = static_cast<std::int64_t>(maximal_cliques(g).size());
  return s;
}

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) toks.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

UndirectedGraph load_edge_list(std::string_view text) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> labels;
  auto intern = [&](const std::string& label) {
    auto it = ids.find(label);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(labels.size());
    ids.emplace(label, id);
    labels.push_back(label);
    return id;
  };

  std::vector<std::pair<int, int>> edges;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0][0] == '#') {
      // "# node <label>" declares an isolated node; other comments are skipped.
      if (toks.size() == 3 && toks[0] == "#" && toks[1] == "node") intern(toks[2]);
      continue;
    }
    if (toks.size() != 2)
      throw ParseError("line " + std::to_string(line_no) + ": expected two node labels, got " +
                       std::to_string(toks.size()) + " tokens");
    if (toks[0] == toks[1])
      throw ValidationError("line " + std::to_string(line_no) + ": self-loop '" + toks[0] +
                            "' is not allowed");
    const int u = intern(toks[0]);  // first-appearance order: left token first
    const int v = intern(toks[1]);
    edges.emplace_back(u, v);
  }
  const int n = static_cast<int>(labels.size());
  return UndirectedGraph(n, edges, std::move(labels));
}

std::string save_edge_list(const UndirectedGraph& g) {
  auto label = [&](int v) {
    return g.has_labels() ? g.labels()[v] : std::to_string(v);
  };
  std::ostringstream out;
  for (int v = 0; v < g.node_count(); ++v)
    if (g.degree(v) == 0) out << "# node " << label(v) << "\n";
  for (auto [u, v] : g.edges()) out << label(u) << " " << label(v) << "\n";
  return out.str();
}

UndirectedGraph read_edge_list_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open edge list file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_edge_list(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_edge_list_file(const UndirectedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open file for writing: " + path.string());
  out << save_edge_list(g);
}

}  // namespace netinfer
