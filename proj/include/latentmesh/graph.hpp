#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace latentmesh {

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;

// Plain graph with ordered adjacency lists. Node ids are dense in [0, N).
// Self-loops and duplicate edges are rejected at insertion; an undirected
// graph keeps its adjacency symmetric.
class Graph {
 public:
  Graph(int num_nodes, bool directed);

  int num_nodes() const { return num_nodes_; }
  bool directed() const { return directed_; }
  std::size_t num_edges() const { return num_edges_; }

  // Returns false (and changes nothing) for self-loops and duplicates.
  bool add_edge(NodeId u, NodeId v);
  bool has_edge(NodeId u, NodeId v) const;

  const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[u]; }

  // Stored edges: (u,v) with u < v for undirected graphs, as-inserted
  // direction otherwise. Sorted.
  std::vector<Edge> edges() const;

  // Undirected graphs: connected. Directed graphs: weakly connected.
  bool is_connected() const;

 private:
  int num_nodes_;
  bool directed_;
  std::size_t num_edges_ = 0;
  std::vector<std::vector<NodeId>> adj_;
};

struct LoadStats {
  int self_loops_dropped = 0;
  int duplicates_dropped = 0;
};

// Edge-list format: one "u v" pair per line, '#' lines ignored.
// N = 1 + max id seen. Throws std::runtime_error naming the offending
// line on malformed input, and on empty input.
Graph load_edge_list(std::istream& in, bool directed, LoadStats* stats = nullptr);
Graph load_edge_list_file(const std::string& path, bool directed, LoadStats* stats = nullptr);

Eigen::MatrixXd adjacency_matrix(const Graph& g);

// L = D - A. Undirected graphs only.
Eigen::MatrixXd laplacian(const Graph& g);

struct EdgeSplit {
  Graph train_graph;
  std::vector<Edge> removed_edges;
  std::vector<Edge> negative_edges;
  // True when connectivity protection capped the removal below the
  // requested fraction.
  bool truncated = false;
};

// Removes ~fraction of the edges while keeping the remainder connected
// (weakly connected when directed): a random spanning tree of the
// undirected view is protected and removal draws from the rest. Samples
// |removed| negatives uniformly from non-edges of the original graph
// (both directions excluded), without replacement; when the graph is too
// dense the negatives are capped at the available non-edges and
// `truncated` is set. Deterministic in seed.
EdgeSplit split_edges(const Graph& g, double fraction, std::uint64_t seed);

}  // namespace latentmesh
