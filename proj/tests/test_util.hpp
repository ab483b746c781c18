#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "latentmesh/diffusion.hpp"
#include "latentmesh/graph.hpp"
#include "latentmesh/rng.hpp"

namespace latentmesh::testutil {

// Directed Erdos-Renyi graph G(n, p).
inline Graph erdos_renyi_directed(int n, double p, std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0xe5));
  Graph g(n, true);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (u != v && rng.uniform() < p) g.add_edge(u, v);
  return g;
}

// Two-block undirected stochastic block model; blocks of n/2 nodes with
// labels 0 and 1. Retries the seed until the sample is connected.
inline Graph sbm_two_block(int n, double p_in, double p_out, std::uint64_t seed,
                           std::vector<int>* labels = nullptr) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(Rng::mix(Rng::mix(seed, attempt), 0x5b1));
    Graph g(n, false);
    const int half = n / 2;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) {
        const bool same = (u < half) == (v < half);
        if (rng.uniform() < (same ? p_in : p_out)) g.add_edge(u, v);
      }
    if (g.is_connected()) {
      if (labels) {
        labels->assign(n, 0);
        for (int v = half; v < n; ++v) (*labels)[v] = 1;
      }
      return g;
    }
  }
}

// Arbitrary valid cascade: random root at time 0, every other node
// activated with probability 0.6 at a uniform time in (0, window].
inline Cascade random_cascade(int n, double window, Rng& rng) {
  Cascade c;
  c.root = static_cast<NodeId>(rng.below(n));
  std::vector<std::pair<double, NodeId>> later;
  for (NodeId v = 0; v < n; ++v) {
    if (v == c.root) continue;
    if (rng.uniform() < 0.6)
      later.emplace_back((0.1 + 0.9 * rng.uniform()) * window, v);
  }
  std::sort(later.begin(), later.end());
  c.events.emplace_back(c.root, 0.0);
  for (const auto& [t, v] : later) c.events.emplace_back(v, t);
  return c;
}

// Random nonnegative rate matrix with zero diagonal; max entry ~2 so the
// paper-literal density can exceed 1 and exercise clamping.
inline Eigen::MatrixXd random_rates(int n, Rng& rng) {
  Eigen::MatrixXd w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : 2.0 * rng.uniform();
  return w;
}

}  // namespace latentmesh::testutil
