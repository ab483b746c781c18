#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "latentmesh/diffusion.hpp"
#include "test_util.hpp"

using namespace latentmesh;

TEST_CASE("isolated root yields a singleton cascade") {
  Graph g(3, false);
  g.add_edge(1, 2);
  Cascade c = simulate_cascade(g, 0, 1.0, 10.0, 1);
  CHECK(c.events.size() == 1);
  CHECK(c.root == 0);
  CHECK(c.events[0].second == 0.0);
}

TEST_CASE("cascade invariants: window, root at zero, increasing times") {
  Graph g = testutil::sbm_two_block(30, 0.3, 0.05, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Cascade c = simulate_cascade(g, static_cast<NodeId>(seed % 30), 1.0, 5.0, seed);
    REQUIRE(!c.events.empty());
    CHECK(c.events.front().first == c.root);
    CHECK(c.events.front().second == 0.0);
    double last = -1.0;
    for (const auto& [node, t] : c.events) {
      CHECK(t >= 0.0);
      CHECK(t <= 5.0);
      CHECK(t >= last);  // event queue emits nondecreasing times
      last = t;
    }
    // Every non-root activation has a strictly earlier activated in-neighbor.
    for (std::size_t e = 1; e < c.events.size(); ++e) {
      const auto [v, t] = c.events[e];
      bool has_earlier_neighbor = false;
      for (std::size_t k = 0; k < e; ++k) {
        const auto [u, tu] = c.events[k];
        if (tu < t && g.has_edge(u, v)) has_earlier_neighbor = true;
      }
      CHECK(has_earlier_neighbor);
    }
  }
}

TEST_CASE("root out of range rejected") {
  Graph g(2, false);
  g.add_edge(0, 1);
  CHECK_THROWS_AS(simulate_cascade(g, 5, 1.0, 10.0, 1), std::out_of_range);
}

TEST_CASE("two-node chain: activation delay is Exponential(1)") {
  // Mean over many runs should match the analytic mean 1.0 within 3
  // standard errors (sd = 1, so se = 1/sqrt(n)).
  Graph g(2, true);
  g.add_edge(0, 1);
  const int n = 100000;
  const double window = 1e9;  // effectively infinite
  double sum = 0.0;
  int activated = 0;
  for (int i = 0; i < n; ++i) {
    Cascade c = simulate_cascade(g, 0, 1.0, window, 1000 + i);
    if (c.events.size() == 2) {
      sum += c.events[1].second;
      ++activated;
    }
  }
  REQUIRE(activated == n);
  const double mean = sum / n;
  CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(mean - 1.0) < 0.02);
}

TEST_CASE("star graph: leaf survival probability matches 1 - exp(-T)") {
  const int leaves = 20;
  Graph g(leaves + 1, false);
  for (int v = 1; v <= leaves; ++v) g.add_edge(0, v);
  const int runs = 2000;
  long activated = 0;
  for (int i = 0; i < runs; ++i) {
    Cascade c = simulate_cascade(g, 0, 1.0, 10.0, 77 + i);
    activated += static_cast<long>(c.events.size()) - 1;
  }
  const double frac = static_cast<double>(activated) / (static_cast<double>(runs) * leaves);
  CHECK(frac > 0.999);  // 1 - exp(-10) ~ 0.99995
}

TEST_CASE("sample_cascades counts and determinism") {
  Graph g(3, false);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  CascadeSet a = sample_cascades(g, 1.0, 10.0, 2, 5);
  CHECK(a.cascades.size() == 6);
  int root_counts[3] = {0, 0, 0};
  for (const Cascade& c : a.cascades) ++root_counts[c.root];
  CHECK(root_counts[0] == 2);
  CHECK(root_counts[1] == 2);
  CHECK(root_counts[2] == 2);

  CascadeSet b = sample_cascades(g, 1.0, 10.0, 2, 5);
  std::ostringstream sa, sb;
  write_cascades(a, sa);
  write_cascades(b, sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("sample_cascades rejects bad input") {
  Graph empty(0, false);
  CHECK_THROWS_AS(sample_cascades(empty, 1.0, 10.0, 1, 1), std::invalid_argument);
  Graph g(2, false);
  g.add_edge(0, 1);
  CHECK_THROWS_AS(sample_cascades(g, 1.0, 10.0, 0, 1), std::invalid_argument);
}

TEST_CASE("reachability: activations stay within the root's component") {
  Graph g(6, true);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(3, 4);  // unreachable from 0
  for (int i = 0; i < 50; ++i) {
    Cascade c = simulate_cascade(g, 0, 2.0, 10.0, i);
    for (const auto& [node, t] : c.events) CHECK(node <= 2);
  }
}

TEST_CASE("cascade file round trip") {
  Graph g = testutil::sbm_two_block(20, 0.3, 0.1, 3);
  CascadeSet set = sample_cascades(g, 1.0, 10.0, 2, 9);
  std::stringstream buf;
  write_cascades(set, buf);
  CascadeSet back = read_cascades(buf);
  REQUIRE(back.cascades.size() == set.cascades.size());
  CHECK(back.window == set.window);
  CHECK(back.num_nodes == set.num_nodes);
  for (std::size_t k = 0; k < set.cascades.size(); ++k) {
    REQUIRE(back.cascades[k].events.size() == set.cascades[k].events.size());
    CHECK(back.cascades[k].root == set.cascades[k].root);
    for (std::size_t e = 0; e < set.cascades[k].events.size(); ++e) {
      CHECK(back.cascades[k].events[e].first == set.cascades[k].events[e].first);
      CHECK(back.cascades[k].events[e].second ==
            doctest::Approx(set.cascades[k].events[e].second).epsilon(1e-8));
    }
  }
}

TEST_CASE("cascade file parsing") {
  SUBCASE("explicit line") {
    std::istringstream in("#T=10 N=3\n0:0.0 2:1.5\n");
    CascadeSet set = read_cascades(in);
    REQUIRE(set.cascades.size() == 1);
    CHECK(set.cascades[0].root == 0);
    CHECK(set.cascades[0].time_of(2) == 1.5);
    CHECK(!set.cascades[0].activated(1));
  }
  SUBCASE("time beyond window rejected") {
    std::istringstream in("#T=10 N=3\n0:0.0 2:11.0\n");
    CHECK_THROWS_WITH_AS(read_cascades(in), doctest::Contains("line 2"), std::runtime_error);
  }
  SUBCASE("missing root-at-zero rejected") {
    std::istringstream in("#T=10 N=3\n0:0.5 2:1.0\n");
    CHECK_THROWS_AS(read_cascades(in), std::runtime_error);
  }
  SUBCASE("malformed token rejected") {
    std::istringstream in("#T=10 N=3\n0:0.0 nonsense\n");
    CHECK_THROWS_AS(read_cascades(in), std::runtime_error);
  }
}
