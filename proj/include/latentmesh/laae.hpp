#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "latentmesh/nn.hpp"

namespace latentmesh {

struct TrainConfig {
  int d = 32;          // embedding dimension
  int z_dim = 0;       // noise dimension; 0 means "same as d"
  double lambda1 = 0.05;
  double lambda2 = 0.5;
  double clip_c = 0.01;
  int batch = 64;
  int iterations = 2000;
  int critic_steps = 5;
  int hidden = 256;      // encoder/decoder hidden width
  int hidden_adv = 64;   // generator/discriminator hidden width
  double lr_ae = 1e-3;   // adaptive-moment step size for AE and generator
  double lr_critic = 5e-5;  // plain SGD step size for the clipped critic
  std::uint64_t seed = 42;

  int noise_dim() const { return z_dim > 0 ? z_dim : d; }
};

// Encoder f, decoder g, generator G and discriminator D as dense nets.
struct LAAEModel {
  DenseNet encoder;        // N -> hidden -> d
  DenseNet decoder;        // d -> hidden -> N (sigmoid output)
  DenseNet generator;      // z_dim -> hidden_adv -> d
  DenseNet discriminator;  // d -> hidden_adv -> 1 (unbounded output)
};

LAAEModel init_model(int num_nodes, const TrainConfig& cfg);

// Reconstruction loss: sum over batch rows of ||x - g(f(x))||^2.
double loss_global(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                   Gradients* encoder_grads = nullptr, Gradients* decoder_grads = nullptr);

// Laplacian-eigenmaps style pull between the embeddings of sampled nodes:
// sum over index pairs a < b in `nodes` of W'(a,b) ||f(x_a) - f(x_b)||^2.
double loss_local(const LAAEModel& model, const Eigen::MatrixXd& features,
                  const std::vector<int>& nodes, const Eigen::MatrixXd& sym_weights,
                  Gradients* encoder_grads = nullptr);

// Clipped-critic loss: -mean D(f(x)) + mean D(G(z)). Gradients flow into
// the discriminator only.
double loss_discriminator(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                          const Eigen::MatrixXd& z_batch,
                          Gradients* disc_grads = nullptr);

// Mirror loss: mean D(f(x)) - mean D(G(z)). Gradients flow into the
// generator only.
double loss_generator(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                      const Eigen::MatrixXd& z_batch, Gradients* gen_grads = nullptr);

struct IterationLosses {
  double global = 0.0;
  double local = 0.0;
  double discriminator = 0.0;
  double generator = 0.0;
};

using TrainHistory = std::vector<IterationLosses>;

struct TrainResult {
  LAAEModel model;
  Eigen::MatrixXd embeddings;  // N x d
  TrainHistory history;
};

struct TrainCallbacks {
  // Invoked after every discriminator update (post-clip).
  std::function<void(int iteration, const DenseNet& discriminator)> after_critic_update;
};

// Block-coordinate training: per iteration one AE step on
// L_glo + lambda1 * L_loc + lambda2 * E[D(f(x))], `critic_steps` clipped
// discriminator updates, then one generator update. With lambda2 = 0 the
// adversarial pair is left untouched. Seed-deterministic.
TrainResult train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& sym_weights,
                  const TrainConfig& cfg, const TrainCallbacks& callbacks = {});

Eigen::MatrixXd embed(const LAAEModel& model, const Eigen::MatrixXd& features);

void write_embeddings_file(const Eigen::MatrixXd& embeddings, const std::string& path);
Eigen::MatrixXd read_embeddings_file(const std::string& path);
void write_history_file(const TrainHistory& history, const std::string& path);

}  // namespace latentmesh
