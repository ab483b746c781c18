#include "latentmesh/diffusion.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "latentmesh/rng.hpp"
#include "latentmesh/text_format.hpp"

namespace latentmesh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LATENTMESH_THREADS")) {
    long v = std::atol(env);
    if (v > 0) return static_cast<int>(std::min<long>(v, hw));
  }
  return static_cast<int>(hw);
}

}  // namespace

double Cascade::time_of(NodeId v) const {
  for (const auto& [node, t] : events)
    if (node == v) return t;
  return kInf;
}

bool Cascade::activated(NodeId v) const { return time_of(v) < kInf; }

Cascade simulate_cascade(const Graph& g, NodeId root, double rate, double window,
                         std::uint64_t seed) {
  if (root < 0 || root >= g.num_nodes())
    throw std::out_of_range("simulate_cascade: root out of range");
  if (!(rate > 0.0)) throw std::invalid_argument("simulate_cascade: rate must be positive");
  if (!(window > 0.0)) throw std::invalid_argument("simulate_cascade: window must be positive");

  Rng rng(seed);
  std::vector<double> time(g.num_nodes(), kInf);

  using Event = std::pair<double, NodeId>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  queue.emplace(0.0, root);

  Cascade c;
  c.root = root;
  while (!queue.empty()) {
    auto [t, u] = queue.top();
    queue.pop();
    if (time[u] < kInf) continue;  // already activated by an earlier arrival
    time[u] = t;
    c.events.emplace_back(u, t);
    for (NodeId v : g.neighbors(u)) {
      if (time[v] < kInf) continue;
      const double arrival = t + rng.exponential(rate);
      if (arrival <= window) queue.emplace(arrival, v);
    }
  }
  return c;
}

CascadeSet sample_cascades(const Graph& g, double rate, double window, int repetitions,
                           std::uint64_t seed) {
  if (g.num_nodes() == 0) throw std::invalid_argument("sample_cascades: empty graph");
  if (repetitions < 1) throw std::invalid_argument("sample_cascades: repetitions must be >= 1");

  const int n = g.num_nodes();
  CascadeSet set;
  set.window = window;
  set.num_nodes = n;
  set.cascades.resize(static_cast<std::size_t>(n) * repetitions);

  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const NodeId root = static_cast<NodeId>(k % n);
      const int rep = static_cast<int>(k / n);
      const std::uint64_t stream = Rng::mix(Rng::mix(seed, root), rep);
      set.cascades[k] = simulate_cascade(g, root, rate, window, stream);
    }
  };

  const std::size_t total = set.cascades.size();
  const int threads = std::min<int>(thread_cap(), static_cast<int>(total));
  if (threads <= 1) {
    run(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return set;
}

void write_cascades(const CascadeSet& set, std::ostream& out) {
  out << "#T=" << format_real(set.window) << " N=" << set.num_nodes << "\n";
  for (const Cascade& c : set.cascades) {
    bool first = true;
    for (const auto& [node, t] : c.events) {
      if (!first) out << ' ';
      out << node << ':' << format_real(t);
      first = false;
    }
    out << '\n';
  }
}

CascadeSet read_cascades(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("cascade file: empty input");
  CascadeSet set;
  if (std::sscanf(line.c_str(), "#T=%lf N=%d", &set.window, &set.num_nodes) != 2)
    throw std::runtime_error("cascade file: bad header line 1");

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    Cascade c;
    std::istringstream ls(line);
    std::string token;
    bool first = true;
    while (ls >> token) {
      const std::size_t colon = token.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("cascade file: malformed token at line " +
                                 std::to_string(line_no));
      NodeId node;
      double t;
      try {
        node = std::stoi(token.substr(0, colon));
        t = std::stod(token.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::runtime_error("cascade file: malformed token at line " +
                                 std::to_string(line_no));
      }
      if (node < 0 || node >= set.num_nodes)
        throw std::runtime_error("cascade file: node out of range at line " +
                                 std::to_string(line_no));
      if (t > set.window)
        throw std::runtime_error("cascade file: time beyond window at line " +
                                 std::to_string(line_no));
      if (first) {
        if (t != 0.0)
          throw std::runtime_error("cascade file: root time must be 0 at line " +
                                   std::to_string(line_no));
        c.root = node;
        first = false;
      }
      c.events.emplace_back(node, t);
    }
    if (c.events.empty())
      throw std::runtime_error("cascade file: empty cascade at line " + std::to_string(line_no));
    set.cascades.push_back(std::move(c));
  }
  if (set.cascades.empty()) throw std::runtime_error("cascade file: no cascades");
  return set;
}

void write_cascades_file(const CascadeSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_cascades(set, out);
}

CascadeSet read_cascades_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cascade file: " + path);
  return read_cascades(in);
}

}  // namespace latentmesh
