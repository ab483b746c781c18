#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "latentmesh/graph.hpp"

namespace latentmesh {

// One diffusion run from a root, clipped to the window [0, T]. Nodes
// absent from `events` are inactive (time treated as infinite).
struct Cascade {
  NodeId root = 0;
  // (node, activation time), sorted by time; events.front() is the root
  // at time exactly 0.
  std::vector<std::pair<NodeId, double>> events;

  // Infinity for inactive nodes.
  double time_of(NodeId v) const;
  bool activated(NodeId v) const;
};

struct CascadeSet {
  double window = 10.0;
  int num_nodes = 0;
  std::vector<Cascade> cascades;
};

// Continuous-time SI dynamics: when u activates at t_u every inactive
// out-neighbor v draws a candidate delay Exponential(rate); v activates at
// the minimum candidate arrival. Candidates beyond T are discarded.
// First-arrival order is realized with an event queue.
Cascade simulate_cascade(const Graph& g, NodeId root, double rate, double window,
                         std::uint64_t seed);

// K = N * repetitions cascades, roots cycling over all nodes. Each cascade
// uses an RNG stream derived from (seed, root, repetition), so the result
// is independent of scheduling. Parallelism capped by LATENTMESH_THREADS.
CascadeSet sample_cascades(const Graph& g, double rate, double window,
                           int repetitions, std::uint64_t seed);

// Text format: header "#T=<window> N=<num_nodes>", then one cascade per
// line of space-separated "node:time" tokens, root (time 0) first.
void write_cascades(const CascadeSet& set, std::ostream& out);
CascadeSet read_cascades(std::istream& in);
void write_cascades_file(const CascadeSet& set, const std::string& path);
CascadeSet read_cascades_file(const std::string& path);

}  // namespace latentmesh
