#include "latentmesh/nn.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "latentmesh/rng.hpp"
#include "latentmesh/text_format.hpp"

namespace latentmesh {

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
  switch (act) {
    case Activation::Identity:
      return z;
    case Activation::ReLU:
      return z.cwiseMax(0.0);
    case Activation::Sigmoid:
      return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
  }
  throw std::logic_error("unknown activation");
}

// dActivation/dz expressed through pre-activation z and output a.
Eigen::MatrixXd activation_grad(const Eigen::MatrixXd& z, const Eigen::MatrixXd& a,
                                Activation act) {
  switch (act) {
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::ReLU:
      return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::Sigmoid:
      return a.array() * (1.0 - a.array());
  }
  throw std::logic_error("unknown activation");
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Identity:
      return "identity";
    case Activation::ReLU:
      return "relu";
    case Activation::Sigmoid:
      return "sigmoid";
  }
  return "?";
}

Activation activation_from(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "relu") return Activation::ReLU;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw std::runtime_error("checkpoint: unknown activation '" + s + "'");
}

}  // namespace

Gradients Gradients::zeros_like(const DenseNet& net) {
  Gradients g;
  for (const Layer& l : net.layers) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    g.bias.emplace_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return g;
}

void Gradients::accumulate(const Gradients& other, double scale) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += scale * other.weights[i];
    bias[i] += scale * other.bias[i];
  }
}

Eigen::MatrixXd forward(const DenseNet& net, const Eigen::MatrixXd& input,
                        ForwardCache* cache) {
  if (net.layers.empty()) throw std::invalid_argument("forward: empty net");
  if (input.cols() != net.layers.front().weights.rows())
    throw std::invalid_argument("forward: input dimension mismatch");
  if (cache) {
    cache->input = input;
    cache->pre.clear();
    cache->post.clear();
  }
  Eigen::MatrixXd a = input;
  for (const Layer& l : net.layers) {
    Eigen::MatrixXd z = (a * l.weights).rowwise() + l.bias.transpose();
    a = apply_activation(z, l.activation);
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->post.push_back(a);
    }
  }
  return a;
}

Gradients backward(const DenseNet& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& output_grad, Eigen::MatrixXd* input_grad) {
  const std::size_t n = net.layers.size();
  if (cache.pre.size() != n || cache.post.size() != n)
    throw std::invalid_argument("backward: cache does not match net");
  if (output_grad.rows() != cache.post.back().rows() ||
      output_grad.cols() != cache.post.back().cols())
    throw std::invalid_argument("backward: output gradient shape mismatch");

  Gradients grads = Gradients::zeros_like(net);
  Eigen::MatrixXd delta = output_grad;
  for (std::size_t li = n; li-- > 0;) {
    const Layer& l = net.layers[li];
    delta = delta.cwiseProduct(activation_grad(cache.pre[li], cache.post[li], l.activation));
    const Eigen::MatrixXd& below = (li == 0) ? cache.input : cache.post[li - 1];
    grads.weights[li] = below.transpose() * delta;
    grads.bias[li] = delta.colwise().sum().transpose();
    if (li > 0 || input_grad) delta = (delta * l.weights.transpose()).eval();
  }
  if (input_grad) *input_grad = delta;
  return grads;
}

AdamState AdamState::for_net(const DenseNet& net, double step_size) {
  AdamState s;
  s.step_size = step_size;
  for (const Layer& l : net.layers) {
    s.m_w.emplace_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    s.v_w.emplace_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
    s.m_b.emplace_back(Eigen::VectorXd::Zero(l.bias.size()));
    s.v_b.emplace_back(Eigen::VectorXd::Zero(l.bias.size()));
  }
  return s;
}

void adam_step(AdamState& state, DenseNet& net, const Gradients& grads) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!grads.weights[i].allFinite())
      throw std::runtime_error("adam_step: non-finite gradient in layer " +
                               std::to_string(i) + " weights");
    if (!grads.bias[i].allFinite())
      throw std::runtime_error("adam_step: non-finite gradient in layer " +
                               std::to_string(i) + " bias");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    auto update = [&](auto& m, auto& v, const auto& g, auto& param) {
      m = state.beta1 * m + (1.0 - state.beta1) * g;
      v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
      param.array() -= state.step_size * (m.array() / bc1) /
                       ((v.array() / bc2).sqrt() + state.epsilon);
    };
    update(state.m_w[i], state.v_w[i], grads.weights[i], net.layers[i].weights);
    update(state.m_b[i], state.v_b[i], grads.bias[i], net.layers[i].bias);
  }
}

void sgd_step(DenseNet& net, const Gradients& grads, double step_size) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (!grads.weights[i].allFinite() || !grads.bias[i].allFinite())
      throw std::runtime_error("sgd_step: non-finite gradient in layer " + std::to_string(i));
    net.layers[i].weights -= step_size * grads.weights[i];
    net.layers[i].bias -= step_size * grads.bias[i];
  }
}

void clip_params(DenseNet& net, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("clip_params: c must be positive");
  for (Layer& l : net.layers) {
    l.weights = l.weights.cwiseMax(-c).cwiseMin(c);
    l.bias = l.bias.cwiseMax(-c).cwiseMin(c);
  }
}

DenseNet init_net(const std::vector<int>& dims, const std::vector<Activation>& activations,
                  std::uint64_t seed) {
  if (dims.size() < 2 || activations.size() != dims.size() - 1)
    throw std::invalid_argument("init_net: need >= 1 layer and matching activations");
  for (int d : dims)
    if (d <= 0) throw std::invalid_argument("init_net: nonpositive dimension");

  Rng rng(Rng::mix(seed, 0x1ce));
  DenseNet net;
  for (std::size_t li = 0; li + 1 < dims.size(); ++li) {
    const int in = dims[li], out = dims[li + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    Layer l;
    l.weights.resize(in, out);
    for (int r = 0; r < in; ++r)
      for (int c = 0; c < out; ++c)
        l.weights(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    l.bias = Eigen::VectorXd::Zero(out);
    l.activation = activations[li];
    net.layers.push_back(std::move(l));
  }
  return net;
}

void write_checkpoint(const DenseNet& net, std::ostream& out) {
  out << "#layers=" << net.layers.size() << "\n";
  for (const Layer& l : net.layers)
    out << "#layer " << l.weights.rows() << ' ' << l.weights.cols() << ' '
        << activation_name(l.activation) << "\n";
  for (const Layer& l : net.layers) {
    for (int r = 0; r < l.weights.rows(); ++r)
      for (int c = 0; c < l.weights.cols(); ++c)
        out << format_real(l.weights(r, c)) << '\n';
    for (int i = 0; i < l.bias.size(); ++i) out << format_real(l.bias(i)) << '\n';
  }
}

DenseNet read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: empty input");
  std::size_t n_layers = 0;
  if (std::sscanf(line.c_str(), "#layers=%zu", &n_layers) != 1 || n_layers == 0)
    throw std::runtime_error("checkpoint: bad header");
  DenseNet net;
  for (std::size_t i = 0; i < n_layers; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("checkpoint: truncated header");
    std::istringstream ls(line);
    std::string tag, act;
    long rows, cols;
    if (!(ls >> tag >> rows >> cols >> act) || tag != "#layer" || rows <= 0 || cols <= 0)
      throw std::runtime_error("checkpoint: bad layer header");
    Layer l;
    l.weights.resize(rows, cols);
    l.bias = Eigen::VectorXd::Zero(cols);
    l.activation = activation_from(act);
    net.layers.push_back(std::move(l));
  }
  auto next_value = [&]() {
    double v;
    if (!(in >> v)) throw std::runtime_error("checkpoint: truncated parameters");
    return v;
  };
  for (Layer& l : net.layers) {
    for (int r = 0; r < l.weights.rows(); ++r)
      for (int c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = next_value();
    for (int i = 0; i < l.bias.size(); ++i) l.bias(i) = next_value();
  }
  return net;
}

void write_checkpoint_file(const DenseNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_checkpoint(net, out);
}

DenseNet read_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  return read_checkpoint(in);
}

double max_abs_param(const DenseNet& net) {
  double m = 0.0;
  for (const Layer& l : net.layers) {
    m = std::max(m, l.weights.cwiseAbs().maxCoeff());
    if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace latentmesh
