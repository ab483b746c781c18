#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace latentmesh {

enum class Activation { Identity, ReLU, Sigmoid };

struct Layer {
  Eigen::MatrixXd weights;  // in x out
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::Identity;
};

// Plain dense feed-forward network. Rows of a batch are samples.
struct DenseNet {
  std::vector<Layer> layers;

  int input_dim() const { return static_cast<int>(layers.front().weights.rows()); }
  int output_dim() const { return static_cast<int>(layers.back().weights.cols()); }
};

// Everything backward() needs, captured by the matching forward() call.
struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
  std::vector<Eigen::MatrixXd> post;  // activation output per layer
};

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> bias;

  static Gradients zeros_like(const DenseNet& net);
  void accumulate(const Gradients& other, double scale = 1.0);
};

Eigen::MatrixXd forward(const DenseNet& net, const Eigen::MatrixXd& input,
                        ForwardCache* cache = nullptr);

// Reverse-mode gradients of the composition. `output_grad` is dLoss/dOutput
// for the batch; the gradient with respect to the input batch is written to
// `input_grad` when given.
Gradients backward(const DenseNet& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& output_grad,
                   Eigen::MatrixXd* input_grad = nullptr);

// Adaptive-moment optimizer state mirroring a net's parameter shapes.
struct AdamState {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;

  static AdamState for_net(const DenseNet& net, double step_size = 1e-3);
};

// Throws on non-finite gradients, naming the offending parameter block.
void adam_step(AdamState& state, DenseNet& net, const Gradients& grads);

void sgd_step(DenseNet& net, const Gradients& grads, double step_size);

// Clamp every weight and bias into [-c, c].
void clip_params(DenseNet& net, double c);

// Glorot-uniform weights, zero biases, seed-deterministic.
DenseNet init_net(const std::vector<int>& dims, const std::vector<Activation>& activations,
                  std::uint64_t seed);

// Checkpoint: header with dims/activations, then parameters as
// 9-significant-digit text (weights row-major, then biases, per layer).
void write_checkpoint(const DenseNet& net, std::ostream& out);
DenseNet read_checkpoint(std::istream& in);
void write_checkpoint_file(const DenseNet& net, const std::string& path);
DenseNet read_checkpoint_file(const std::string& path);

double max_abs_param(const DenseNet& net);

}  // namespace latentmesh
