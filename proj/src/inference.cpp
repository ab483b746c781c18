#include "latentmesh/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "latentmesh/text_format.hpp"

namespace latentmesh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_factor(double x) {
  return std::clamp(x, kLikelihoodEps, 1.0 - kLikelihoodEps);
}

// Cascade unpacked against a fixed node count for O(1) time lookups.
struct CompiledCascade {
  std::vector<double> time;       // kInf for inactive nodes
  std::vector<NodeId> active;     // in activation order (root first)
  std::vector<NodeId> inactive;
  NodeId root = 0;
};

CompiledCascade compile(const Cascade& c, int n) {
  if (c.events.empty() || c.events.front().second != 0.0 ||
      c.events.front().first != c.root)
    throw std::invalid_argument("cascade: root must be first with time 0");
  CompiledCascade cc;
  cc.root = c.root;
  cc.time.assign(n, kInf);
  cc.active.reserve(c.events.size());
  for (const auto& [node, t] : c.events) {
    if (node < 0 || node >= n)
      throw std::invalid_argument("cascade: node id out of range");
    cc.time[node] = t;
    cc.active.push_back(node);
  }
  for (NodeId v = 0; v < n; ++v)
    if (cc.time[v] == kInf) cc.inactive.push_back(v);
  return cc;
}

double log_non_activation(double w, double dt, LikelihoodMode mode) {
  if (mode == LikelihoodMode::PaperLiteral)
    return std::log(clamp_factor(1.0 - pair_density(0.0, dt, w)));
  return std::log(clamp_factor(std::exp(-w * dt)));
}

// Log contribution of node j within one cascade: the activation term for
// a non-root activated node, or the sum of censoring factors into j when
// j is inactive. The root contributes nothing of its own.
double node_log_term(const CompiledCascade& cc, const Eigen::MatrixXd& w, NodeId j,
                     double window, LikelihoodMode mode, LikelihoodStats* stats) {
  const double t_j = cc.time[j];
  if (t_j == kInf) {
    double total = 0.0;
    for (NodeId k : cc.active) total += log_non_activation(w(k, j), window - cc.time[k], mode);
    return total;
  }
  if (j == cc.root) return 0.0;

  double hazard_sum = 0.0;
  double log_prod = 0.0;
  for (NodeId k : cc.active) {
    const double t_k = cc.time[k];
    if (!(t_k < t_j)) continue;
    const double rate = w(k, j);
    const double dt = t_j - t_k;
    if (mode == LikelihoodMode::PaperLiteral) {
      const double f = pair_density(t_k, t_j, rate);
      const double factor = clamp_factor(1.0 - f);
      hazard_sum += f / factor;
      log_prod += std::log(factor);
    } else {
      hazard_sum += rate;
      log_prod += std::log(clamp_factor(std::exp(-rate * dt)));
    }
  }
  if (!(hazard_sum > kLikelihoodEps)) {
    if (stats) ++stats->degenerate_terms;
    hazard_sum = kLikelihoodEps;
  }
  return std::log(hazard_sum) + log_prod;
}

double compiled_log_likelihood(const CompiledCascade& cc, const Eigen::MatrixXd& w,
                               double window, LikelihoodMode mode, LikelihoodStats* stats) {
  double total = 0.0;
  for (std::size_t e = 1; e < cc.active.size(); ++e)
    total += node_log_term(cc, w, cc.active[e], window, mode, stats);
  for (NodeId l : cc.inactive) total += node_log_term(cc, w, l, window, mode, stats);
  return total;
}

}  // namespace

double pair_density(double t_i, double t_j, double w) {
  if (!(t_i < t_j)) return 0.0;
  return w * std::exp(-w * (t_j - t_i));
}

double cascade_log_likelihood(const Cascade& c, const TransmissionMatrix& w, double window,
                              LikelihoodMode mode, LikelihoodStats* stats) {
  return compiled_log_likelihood(compile(c, w.num_nodes), w.values, window, mode, stats);
}

double set_log_likelihood(const CascadeSet& set, const TransmissionMatrix& w,
                          LikelihoodMode mode, LikelihoodStats* stats) {
  double total = 0.0;
  for (const Cascade& c : set.cascades)
    total += cascade_log_likelihood(c, w, set.window, mode, stats);
  return total;
}

TransmissionMatrix closed_form_estimate(const CascadeSet& set, double tau) {
  if (set.cascades.empty())
    throw std::invalid_argument("closed_form_estimate: empty cascade set");
  const int n = set.num_nodes;
  const double window = set.window;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);

  for (const Cascade& c : set.cascades) {
    const CompiledCascade cc = compile(c, n);
    const std::size_t m = cc.active.size();
    for (std::size_t a = 0; a < m; ++a) {
      const NodeId i = cc.active[a];
      const double t_i = cc.time[i];
      // Activation evidence: strictly earlier i toward activated j.
      for (std::size_t b = a + 1; b < m; ++b) {
        const NodeId j = cc.active[b];
        const double t_j = cc.time[j];
        if (!(t_i < t_j)) continue;
        sums(i, j) += 1.0 / (t_j - t_i);
        counts(i, j) += 1.0;
      }
      // Censoring evidence toward inactive nodes; t_i = T would divide by
      // zero and is skipped.
      if (t_i >= window) continue;
      for (NodeId j : cc.inactive) {
        sums(i, j) += 1.0 / (window - t_i);
        counts(i, j) += 1.0;
      }
    }
  }

  TransmissionMatrix w = TransmissionMatrix::zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || counts(i, j) == 0.0) continue;
      const double v = sums(i, j) / counts(i, j);
      w.values(i, j) = (v < tau) ? 0.0 : v;
    }
  return w;
}

TransmissionMatrix mle_estimate(const CascadeSet& set, const TransmissionMatrix& init,
                                int steps, double step_size, LikelihoodMode mode) {
  if (steps < 1) throw std::invalid_argument("mle_estimate: steps must be >= 1");
  if (!(step_size > 0.0)) throw std::invalid_argument("mle_estimate: step size must be > 0");
  const int n = set.num_nodes;
  const double window = set.window;

  std::vector<CompiledCascade> compiled;
  compiled.reserve(set.cascades.size());
  for (const Cascade& c : set.cascades) compiled.push_back(compile(c, n));

  // Only pairs that co-occur in some cascade carry likelihood signal; the
  // rest stay at their initial value.
  std::vector<Edge> active_pairs;
  {
    Eigen::MatrixXd co = Eigen::MatrixXd::Zero(n, n);
    for (const CompiledCascade& cc : compiled) {
      for (std::size_t a = 0; a < cc.active.size(); ++a) {
        const NodeId i = cc.active[a];
        for (std::size_t b = a + 1; b < cc.active.size(); ++b)
          if (cc.time[i] < cc.time[cc.active[b]]) co(i, cc.active[b]) = 1.0;
        if (cc.time[i] < window)
          for (NodeId j : cc.inactive) co(i, j) = 1.0;
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && co(i, j) > 0.0) active_pairs.emplace_back(i, j);
  }

  Eigen::MatrixXd w = init.values;
  auto objective = [&](const Eigen::MatrixXd& m) {
    double total = 0.0;
    for (const CompiledCascade& cc : compiled)
      total += compiled_log_likelihood(cc, m, window, mode, nullptr);
    return total;
  };

  double best_obj = objective(w);
  if (!std::isfinite(best_obj))
    throw std::runtime_error("mle_estimate: objective not finite at init");
  Eigen::MatrixXd best = w;

  const double h = 1e-5;
  // Perturbing W(i,j) only changes node-j terms, so the finite difference
  // is evaluated on those terms alone.
  auto pair_gradient = [&](Eigen::MatrixXd& m, NodeId i, NodeId j) {
    const double w0 = m(i, j);
    const double lo = (w0 >= h) ? w0 - h : w0;  // stay in the feasible cone
    const double hi = w0 + h;
    double f_hi = 0.0, f_lo = 0.0;
    for (const CompiledCascade& cc : compiled) {
      const bool j_inactive = cc.time[j] == kInf;
      const bool interacts =
          cc.time[i] < kInf &&
          ((j_inactive && cc.time[i] < window) || cc.time[i] < cc.time[j]);
      if (!interacts) continue;
      m(i, j) = hi;
      f_hi += node_log_term(cc, m, j, window, mode, nullptr);
      m(i, j) = lo;
      f_lo += node_log_term(cc, m, j, window, mode, nullptr);
    }
    m(i, j) = w0;
    return (f_hi - f_lo) / (hi - lo);
  };

  for (int step = 0; step < steps; ++step) {
    std::vector<double> grad(active_pairs.size());
    for (std::size_t p = 0; p < active_pairs.size(); ++p)
      grad[p] = pair_gradient(w, active_pairs[p].first, active_pairs[p].second);
    for (std::size_t p = 0; p < active_pairs.size(); ++p) {
      auto [i, j] = active_pairs[p];
      w(i, j) = std::max(0.0, w(i, j) + step_size * grad[p]);
    }
    w.diagonal().setZero();
    const double obj = objective(w);
    if (obj > best_obj) {
      best_obj = obj;
      best = w;
    }
  }
  return {n, std::move(best)};
}

Eigen::MatrixXd feature_matrix(const TransmissionMatrix& w) {
  const double m = w.values.maxCoeff();
  if (m <= 0.0) return Eigen::MatrixXd::Zero(w.num_nodes, w.num_nodes);
  return w.values / m;
}

Eigen::MatrixXd symmetric_weights(const TransmissionMatrix& w) {
  Eigen::MatrixXd s = (w.values + w.values.transpose()) / 2.0;
  const double m = s.maxCoeff();
  if (m <= 0.0) return Eigen::MatrixXd::Zero(w.num_nodes, w.num_nodes);
  return s / m;
}

void write_transmission_matrix(const TransmissionMatrix& w, std::ostream& out) {
  out << "#N=" << w.num_nodes << "\n";
  for (int i = 0; i < w.num_nodes; ++i)
    for (int j = 0; j < w.num_nodes; ++j)
      if (w.values(i, j) != 0.0)
        out << i << ' ' << j << ' ' << format_real(w.values(i, j)) << '\n';
}

TransmissionMatrix read_transmission_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix file: empty input");
  int n = 0;
  if (std::sscanf(line.c_str(), "#N=%d", &n) != 1 || n <= 0)
    throw std::runtime_error("matrix file: bad header");
  TransmissionMatrix w = TransmissionMatrix::zero(n);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int i, j;
    double v;
    if (!(ls >> i >> j >> v) || i < 0 || j < 0 || i >= n || j >= n || v < 0.0)
      throw std::runtime_error("matrix file: malformed line " + std::to_string(line_no));
    w.values(i, j) = v;
  }
  return w;
}

void write_transmission_matrix_file(const TransmissionMatrix& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_transmission_matrix(w, out);
}

TransmissionMatrix read_transmission_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  return read_transmission_matrix(in);
}

}  // namespace latentmesh
