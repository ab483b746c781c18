#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "latentmesh/graph.hpp"
#include "test_util.hpp"

using namespace latentmesh;

TEST_CASE("load_edge_list builds an undirected graph") {
  std::istringstream in("0 1\n1 2\n");
  Graph g = load_edge_list(in, false);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK(g.has_edge(1, 2));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("load_edge_list drops self-loops with a count") {
  std::istringstream in("0 0\n0 1\n");
  LoadStats stats;
  Graph g = load_edge_list(in, false, &stats);
  CHECK(g.num_edges() == 1);
  CHECK(stats.self_loops_dropped == 1);
}

TEST_CASE("load_edge_list drops duplicates and skips comments") {
  std::istringstream in("# c\n0 1\n0 1\n");
  LoadStats stats;
  Graph g = load_edge_list(in, false, &stats);
  CHECK(g.num_edges() == 1);
  CHECK(stats.duplicates_dropped == 1);
}

TEST_CASE("load_edge_list errors") {
  std::istringstream malformed("0 x\n");
  CHECK_THROWS_WITH_AS(load_edge_list(malformed, false),
                       doctest::Contains("line 1"), std::runtime_error);
  std::istringstream empty("# only a comment\n");
  CHECK_THROWS_AS(load_edge_list(empty, false), std::runtime_error);
}

TEST_CASE("adjacency_matrix") {
  SUBCASE("path graph") {
    Graph g(3, false);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    Eigen::MatrixXd a = adjacency_matrix(g);
    CHECK(a(0, 1) == 1.0);
    CHECK(a(1, 0) == 1.0);
    CHECK(a(1, 2) == 1.0);
    CHECK(a(2, 1) == 1.0);
    CHECK(a.sum() == 4.0);
    CHECK(a.diagonal().isZero());
  }
  SUBCASE("empty graph") {
    Graph g(2, false);
    CHECK(adjacency_matrix(g).isZero());
  }
  SUBCASE("directed edge is one-sided") {
    Graph g(2, true);
    g.add_edge(0, 1);
    Eigen::MatrixXd a = adjacency_matrix(g);
    CHECK(a(0, 1) == 1.0);
    CHECK(a(1, 0) == 0.0);
  }
}

TEST_CASE("laplacian") {
  SUBCASE("single edge") {
    Graph g(2, false);
    g.add_edge(0, 1);
    Eigen::MatrixXd l = laplacian(g);
    CHECK(l(0, 0) == 1.0);
    CHECK(l(0, 1) == -1.0);
    CHECK(l(1, 0) == -1.0);
    CHECK(l(1, 1) == 1.0);
  }
  SUBCASE("isolated node") {
    Graph g(1, false);
    CHECK(laplacian(g).isZero());
  }
  SUBCASE("triangle") {
    Graph g(3, false);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    Eigen::MatrixXd l = laplacian(g);
    for (int i = 0; i < 3; ++i) {
      CHECK(l(i, i) == 2.0);
      CHECK(l.row(i).sum() == 0.0);
    }
  }
  SUBCASE("directed input rejected") {
    Graph g(2, true);
    g.add_edge(0, 1);
    CHECK_THROWS_AS(laplacian(g), std::invalid_argument);
  }
}

TEST_CASE("split_edges on a tree removes nothing") {
  Graph g(4, false);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  EdgeSplit split = split_edges(g, 0.5, 7);
  CHECK(split.removed_edges.empty());
  CHECK(split.truncated);
  CHECK(split.train_graph.num_edges() == 3);
}

TEST_CASE("split_edges on a triangle removes exactly one edge") {
  Graph g(3, false);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 2);
  EdgeSplit split = split_edges(g, 0.34, 3);
  CHECK(split.removed_edges.size() == 1);
  CHECK(split.train_graph.is_connected());
  // K3 has no non-edges, so negative sampling is capped at zero.
  CHECK(split.negative_edges.empty());
  CHECK(split.truncated);
}

TEST_CASE("split_edges is deterministic in the seed") {
  Graph g = testutil::sbm_two_block(40, 0.3, 0.05, 11);
  EdgeSplit a = split_edges(g, 0.5, 123);
  EdgeSplit b = split_edges(g, 0.5, 123);
  CHECK(a.removed_edges == b.removed_edges);
  CHECK(a.negative_edges == b.negative_edges);
  CHECK(a.train_graph.edges() == b.train_graph.edges());
}

TEST_CASE("split_edges partitions edges and keeps the train graph connected") {
  Graph g = testutil::sbm_two_block(60, 0.25, 0.04, 5);
  for (std::uint64_t seed : {1, 2, 3}) {
    EdgeSplit split = split_edges(g, 0.5, seed);

    const std::vector<Edge> g_edges = g.edges();
    const std::vector<Edge> t_edges = split.train_graph.edges();
    std::set<Edge> original(g_edges.begin(), g_edges.end());
    std::set<Edge> train(t_edges.begin(), t_edges.end());
    std::set<Edge> removed(split.removed_edges.begin(), split.removed_edges.end());

    CHECK(split.train_graph.is_connected());
    CHECK(train.size() + removed.size() == original.size());
    for (const Edge& e : removed) {
      CHECK(original.count(e) == 1);
      CHECK(train.count(e) == 0);
    }
    CHECK(split.negative_edges.size() == split.removed_edges.size());
    for (const Edge& e : split.negative_edges) {
      CHECK_FALSE(g.has_edge(e.first, e.second));
      CHECK_FALSE(g.has_edge(e.second, e.first));
    }
    std::set<Edge> negatives(split.negative_edges.begin(), split.negative_edges.end());
    CHECK(negatives.size() == split.negative_edges.size());  // no replacement
  }
}

TEST_CASE("split_edges rejects a disconnected graph") {
  Graph g(4, false);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  CHECK_THROWS_AS(split_edges(g, 0.5, 1), std::invalid_argument);
}

TEST_CASE("split_edges works on directed graphs via weak connectivity") {
  Graph g(4, true);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(3, 0);
  g.add_edge(0, 2);
  g.add_edge(2, 0);
  EdgeSplit split = split_edges(g, 0.34, 9);
  CHECK(split.train_graph.is_connected());
  CHECK(split.removed_edges.size() + split.train_graph.num_edges() == g.num_edges());
}
