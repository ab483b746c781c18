#include "latentmesh/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "latentmesh/rng.hpp"

namespace latentmesh {

namespace {

std::uint64_t edge_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

Graph::Graph(int num_nodes, bool directed)
    : num_nodes_(num_nodes), directed_(directed), adj_(std::max(num_nodes, 0)) {
  if (num_nodes < 0) throw std::invalid_argument("graph: negative node count");
}

bool Graph::add_edge(NodeId u, NodeId v) {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_)
    throw std::out_of_range("graph: node id out of range");
  if (u == v) return false;
  auto& row = adj_[u];
  auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it != row.end() && *it == v) return false;
  row.insert(it, v);
  if (!directed_) {
    auto& back = adj_[v];
    back.insert(std::lower_bound(back.begin(), back.end(), u), u);
  }
  ++num_edges_;
  return true;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) return false;
  const auto& row = adj_[u];
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < num_nodes_; ++u)
    for (NodeId v : adj_[u])
      if (directed_ || u < v) out.emplace_back(u, v);
  return out;
}

bool Graph::is_connected() const {
  if (num_nodes_ == 0) return false;
  if (num_nodes_ == 1) return true;
  std::vector<char> seen(num_nodes_, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  int count = 1;
  // Undirected view: for directed graphs this checks weak connectivity.
  std::vector<std::vector<NodeId>> back;
  if (directed_) {
    back.assign(num_nodes_, {});
    for (NodeId u = 0; u < num_nodes_; ++u)
      for (NodeId v : adj_[u]) back[v].push_back(u);
  }
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    auto visit = [&](NodeId v) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    };
    for (NodeId v : adj_[u]) visit(v);
    if (directed_)
      for (NodeId v : back[u]) visit(v);
  }
  return count == num_nodes_;
}

Graph load_edge_list(std::istream& in, bool directed, LoadStats* stats) {
  std::vector<Edge> raw;
  NodeId max_id = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u >> v) || u < 0 || v < 0)
      throw std::runtime_error("edge list: malformed line " + std::to_string(line_no));
    std::string trailing;
    if (ls >> trailing)
      throw std::runtime_error("edge list: malformed line " + std::to_string(line_no));
    raw.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    max_id = std::max({max_id, static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  if (raw.empty()) throw std::runtime_error("edge list: empty input");
  Graph g(max_id + 1, directed);
  LoadStats local;
  for (const auto& [u, v] : raw) {
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    if (!g.add_edge(u, v)) ++local.duplicates_dropped;
  }
  if (stats) *stats = local;
  return g;
}

Graph load_edge_list_file(const std::string& path, bool directed, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_edge_list(in, directed, stats);
}

Eigen::MatrixXd adjacency_matrix(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u)) a(u, v) = 1.0;
  return a;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  if (g.directed())
    throw std::invalid_argument("laplacian: defined for undirected graphs only");
  const int n = g.num_nodes();
  Eigen::MatrixXd l = -adjacency_matrix(g);
  for (NodeId u = 0; u < n; ++u)
    l(u, u) = static_cast<double>(g.neighbors(u).size());
  return l;
}

EdgeSplit split_edges(const Graph& g, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split_edges: fraction must lie in (0,1)");
  if (!g.is_connected()) throw std::invalid_argument("split_edges: graph is disconnected");

  const int n = g.num_nodes();
  Rng rng(Rng::mix(seed, 0x51907));

  // Undirected view for the spanning tree.
  std::vector<std::vector<NodeId>> undirected(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u)) {
      undirected[u].push_back(v);
      if (g.directed()) undirected[v].push_back(u);
    }

  // Random-order traversal from a random root; visited edges form the tree.
  std::unordered_set<std::uint64_t> protected_pairs;  // key with u < v
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{static_cast<NodeId>(rng.below(n))};
  seen[stack[0]] = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    auto nbrs = undirected[u];
    for (std::size_t i = nbrs.size(); i > 1; --i)
      std::swap(nbrs[i - 1], nbrs[rng.below(i)]);
    for (NodeId v : nbrs) {
      if (seen[v]) continue;
      seen[v] = 1;
      protected_pairs.insert(edge_key(std::min(u, v), std::max(u, v)));
      stack.push_back(v);
    }
  }

  std::vector<Edge> all = g.edges();
  std::vector<Edge> removable;
  for (const Edge& e : all) {
    NodeId a = std::min(e.first, e.second), b = std::max(e.first, e.second);
    if (!protected_pairs.count(edge_key(a, b))) removable.push_back(e);
  }

  const std::size_t requested =
      static_cast<std::size_t>(fraction * static_cast<double>(all.size()));
  const std::size_t n_remove = std::min(requested, removable.size());

  for (std::size_t i = removable.size(); i > 1; --i)
    std::swap(removable[i - 1], removable[rng.below(i)]);
  std::vector<Edge> removed(removable.begin(), removable.begin() + n_remove);
  std::sort(removed.begin(), removed.end());

  EdgeSplit split{Graph(n, g.directed()), std::move(removed), {}, requested > n_remove};
  std::unordered_set<std::uint64_t> removed_keys;
  for (const Edge& e : split.removed_edges) removed_keys.insert(edge_key(e.first, e.second));
  for (const Edge& e : all)
    if (!removed_keys.count(edge_key(e.first, e.second)))
      split.train_graph.add_edge(e.first, e.second);

  // Negatives: uniform non-edges of the ORIGINAL graph, both directions
  // excluded, without replacement.
  const std::size_t pool = static_cast<std::size_t>(n) * (n - 1) / 2;
  // Distinct unordered pairs with at least one direction present.
  std::unordered_set<std::uint64_t> pairs;
  for (const Edge& e : all)
    pairs.insert(edge_key(std::min(e.first, e.second), std::max(e.first, e.second)));
  // Dense graphs may not hold |removed| non-edges; cap rather than fail.
  const std::size_t available = pool - pairs.size();
  const std::size_t want = std::min(split.removed_edges.size(), available);
  if (want < split.removed_edges.size()) split.truncated = true;

  std::unordered_set<std::uint64_t> drawn;
  while (split.negative_edges.size() < want) {
    NodeId u = static_cast<NodeId>(rng.below(n));
    NodeId v = static_cast<NodeId>(rng.below(n));
    if (u == v) continue;
    NodeId a = std::min(u, v), b = std::max(u, v);
    if (g.has_edge(a, b) || g.has_edge(b, a)) continue;
    if (!drawn.insert(edge_key(a, b)).second) continue;
    split.negative_edges.emplace_back(a, b);
  }
  std::sort(split.negative_edges.begin(), split.negative_edges.end());
  return split;
}

}  // namespace latentmesh
