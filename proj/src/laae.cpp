#include "latentmesh/laae.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "latentmesh/rng.hpp"
#include "latentmesh/text_format.hpp"

namespace latentmesh {

namespace {

std::vector<int> sample_indices(Rng& rng, int n, int count) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < count; ++i)
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  pool.resize(count);
  return pool;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
  Eigen::MatrixXd out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

Eigen::MatrixXd noise_batch(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd z(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) z(r, c) = rng.normal();
  return z;
}

// Gradient of mean D(f(x)) with respect to the encoder parameters.
double encoder_adversarial_term(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                                Gradients* encoder_grads) {
  ForwardCache enc_cache;
  const Eigen::MatrixXd y = forward(model.encoder, x_batch, &enc_cache);
  ForwardCache disc_cache;
  const Eigen::MatrixXd scores = forward(model.discriminator, y, &disc_cache);
  const double value = scores.mean();
  if (encoder_grads) {
    const Eigen::MatrixXd dout =
        Eigen::MatrixXd::Constant(scores.rows(), 1, 1.0 / scores.rows());
    Eigen::MatrixXd dy;
    backward(model.discriminator, disc_cache, dout, &dy);
    *encoder_grads = backward(model.encoder, enc_cache, dy);
  }
  return value;
}

}  // namespace

LAAEModel init_model(int num_nodes, const TrainConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("init_model: d must be >= 1");
  LAAEModel m;
  m.encoder = init_net({num_nodes, cfg.hidden, cfg.d},
                       {Activation::ReLU, Activation::Identity}, Rng::mix(cfg.seed, 1));
  m.decoder = init_net({cfg.d, cfg.hidden, num_nodes},
                       {Activation::ReLU, Activation::Sigmoid}, Rng::mix(cfg.seed, 2));
  m.generator = init_net({cfg.noise_dim(), cfg.hidden_adv, cfg.d},
                         {Activation::ReLU, Activation::Identity}, Rng::mix(cfg.seed, 3));
  m.discriminator = init_net({cfg.d, cfg.hidden_adv, 1},
                             {Activation::ReLU, Activation::Identity}, Rng::mix(cfg.seed, 4));
  return m;
}

double loss_global(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                   Gradients* encoder_grads, Gradients* decoder_grads) {
  ForwardCache enc_cache, dec_cache;
  const Eigen::MatrixXd y = forward(model.encoder, x_batch, &enc_cache);
  const Eigen::MatrixXd recon = forward(model.decoder, y, &dec_cache);
  const Eigen::MatrixXd diff = recon - x_batch;
  const double loss = diff.squaredNorm();
  if (encoder_grads || decoder_grads) {
    Eigen::MatrixXd dy;
    Gradients dec = backward(model.decoder, dec_cache, 2.0 * diff, &dy);
    if (decoder_grads) *decoder_grads = std::move(dec);
    if (encoder_grads) *encoder_grads = backward(model.encoder, enc_cache, dy);
  }
  return loss;
}

double loss_local(const LAAEModel& model, const Eigen::MatrixXd& features,
                  const std::vector<int>& nodes, const Eigen::MatrixXd& sym_weights,
                  Gradients* encoder_grads) {
  const Eigen::MatrixXd x_batch = gather_rows(features, nodes);
  ForwardCache enc_cache;
  const Eigen::MatrixXd y = forward(model.encoder, x_batch, &enc_cache);

  const std::size_t b = nodes.size();
  double loss = 0.0;
  Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  for (std::size_t a = 0; a < b; ++a)
    for (std::size_t c = a + 1; c < b; ++c) {
      const double w = sym_weights(nodes[a], nodes[c]);
      if (w == 0.0) continue;
      const Eigen::RowVectorXd diff = y.row(a) - y.row(c);
      loss += w * diff.squaredNorm();
      dy.row(a) += 2.0 * w * diff;
      dy.row(c) -= 2.0 * w * diff;
    }
  if (encoder_grads) *encoder_grads = backward(model.encoder, enc_cache, dy);
  return loss;
}

double loss_discriminator(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                          const Eigen::MatrixXd& z_batch, Gradients* disc_grads) {
  const Eigen::MatrixXd y = forward(model.encoder, x_batch);
  const Eigen::MatrixXd fake = forward(model.generator, z_batch);
  ForwardCache real_cache, fake_cache;
  const Eigen::MatrixXd d_real = forward(model.discriminator, y, &real_cache);
  const Eigen::MatrixXd d_fake = forward(model.discriminator, fake, &fake_cache);
  const double loss = -d_real.mean() + d_fake.mean();
  if (disc_grads) {
    *disc_grads = backward(
        model.discriminator, real_cache,
        Eigen::MatrixXd::Constant(d_real.rows(), 1, -1.0 / d_real.rows()));
    disc_grads->accumulate(backward(
        model.discriminator, fake_cache,
        Eigen::MatrixXd::Constant(d_fake.rows(), 1, 1.0 / d_fake.rows())));
  }
  return loss;
}

double loss_generator(const LAAEModel& model, const Eigen::MatrixXd& x_batch,
                      const Eigen::MatrixXd& z_batch, Gradients* gen_grads) {
  const Eigen::MatrixXd y = forward(model.encoder, x_batch);
  const Eigen::MatrixXd d_real = forward(model.discriminator, y);
  ForwardCache gen_cache, disc_cache;
  const Eigen::MatrixXd fake = forward(model.generator, z_batch, &gen_cache);
  const Eigen::MatrixXd d_fake = forward(model.discriminator, fake, &disc_cache);
  const double loss = d_real.mean() - d_fake.mean();
  if (gen_grads) {
    Eigen::MatrixXd dfake;
    backward(model.discriminator, disc_cache,
             Eigen::MatrixXd::Constant(d_fake.rows(), 1, -1.0 / d_fake.rows()), &dfake);
    *gen_grads = backward(model.generator, gen_cache, dfake);
  }
  return loss;
}

TrainResult train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& sym_weights,
                  const TrainConfig& cfg, const TrainCallbacks& callbacks) {
  const int n = static_cast<int>(features.rows());
  if (cfg.batch < 1 || cfg.batch > n)
    throw std::invalid_argument("train: batch size must lie in [1, N]");
  if (cfg.lambda1 < 0.0 || cfg.lambda2 < 0.0)
    throw std::invalid_argument("train: lambda1 and lambda2 must be nonnegative");
  if (sym_weights.rows() != n || sym_weights.cols() != n)
    throw std::invalid_argument("train: weight matrix shape mismatch");

  TrainResult result;
  result.model = init_model(n, cfg);
  LAAEModel& model = result.model;

  AdamState enc_opt = AdamState::for_net(model.encoder, cfg.lr_ae);
  AdamState dec_opt = AdamState::for_net(model.decoder, cfg.lr_ae);
  AdamState gen_opt = AdamState::for_net(model.generator, cfg.lr_ae);

  Rng rng(Rng::mix(cfg.seed, 0x7a11));
  const bool adversarial = cfg.lambda2 > 0.0;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    IterationLosses losses;

    // Auto-encoder block: L_glo + lambda1 L_loc + lambda2 E[D(f(x))].
    const std::vector<int> idx = sample_indices(rng, n, cfg.batch);
    const Eigen::MatrixXd x_batch = gather_rows(features, idx);

    Gradients enc_grads, dec_grads;
    losses.global = loss_global(model, x_batch, &enc_grads, &dec_grads);

    Gradients local_grads;
    losses.local = loss_local(model, features, idx, sym_weights, &local_grads);
    enc_grads.accumulate(local_grads, cfg.lambda1);

    if (adversarial) {
      Gradients adv_grads;
      encoder_adversarial_term(model, x_batch, &adv_grads);
      enc_grads.accumulate(adv_grads, cfg.lambda2);
    }
    adam_step(enc_opt, model.encoder, enc_grads);
    adam_step(dec_opt, model.decoder, dec_grads);

    if (adversarial) {
      // Clipped-critic block.
      std::vector<int> critic_idx;
      for (int s = 0; s < cfg.critic_steps; ++s) {
        critic_idx = sample_indices(rng, n, cfg.batch);
        const Eigen::MatrixXd xc = gather_rows(features, critic_idx);
        const Eigen::MatrixXd zc = noise_batch(rng, cfg.batch, cfg.noise_dim());
        Gradients disc_grads;
        losses.discriminator = loss_discriminator(model, xc, zc, &disc_grads);
        Gradients scaled = Gradients::zeros_like(model.discriminator);
        scaled.accumulate(disc_grads, cfg.lambda2);
        sgd_step(model.discriminator, scaled, cfg.lr_critic);
        clip_params(model.discriminator, cfg.clip_c);
        if (max_abs_param(model.discriminator) > cfg.clip_c)
          throw std::logic_error("train: clip invariant violated");
        if (callbacks.after_critic_update)
          callbacks.after_critic_update(iter, model.discriminator);
      }

      // Generator block.
      const Eigen::MatrixXd xg = gather_rows(features, critic_idx);
      const Eigen::MatrixXd zg = noise_batch(rng, cfg.batch, cfg.noise_dim());
      Gradients gen_grads;
      losses.generator = loss_generator(model, xg, zg, &gen_grads);
      Gradients scaled = Gradients::zeros_like(model.generator);
      scaled.accumulate(gen_grads, cfg.lambda2);
      adam_step(gen_opt, model.generator, scaled);
    }

    if (!std::isfinite(losses.global) || !std::isfinite(losses.local) ||
        !std::isfinite(losses.discriminator) || !std::isfinite(losses.generator))
      throw std::runtime_error("train: non-finite loss at iteration " + std::to_string(iter));
    result.history.push_back(losses);
  }

  result.embeddings = embed(model, features);
  return result;
}

Eigen::MatrixXd embed(const LAAEModel& model, const Eigen::MatrixXd& features) {
  return forward(model.encoder, features);
}

void write_embeddings_file(const Eigen::MatrixXd& embeddings, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int i = 0; i < embeddings.rows(); ++i) {
    out << i;
    for (int j = 0; j < embeddings.cols(); ++j)
      out << ' ' << format_real(embeddings(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_embeddings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long id;
    if (!(ls >> id) || id != static_cast<long>(rows.size()))
      throw std::runtime_error("embeddings: bad node id at line " + std::to_string(line_no));
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (vals.empty() || (!rows.empty() && vals.size() != rows.front().size()))
      throw std::runtime_error("embeddings: bad row at line " + std::to_string(line_no));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error("embeddings: empty file");
  Eigen::MatrixXd y(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) y(i, j) = rows[i][j];
  return y;
}

void write_history_file(const TrainHistory& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < history.size(); ++i)
    out << i << ' ' << format_real(history[i].global) << ' '
        << format_real(history[i].local) << ' '
        << format_real(history[i].discriminator) << ' '
        << format_real(history[i].generator) << '\n';
}

}  // namespace latentmesh
