#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "latentmesh/diffusion.hpp"

namespace latentmesh {

// Nonnegative pairwise transmission rates with a zero diagonal. Covers
// both existing edges and inferred latent ties.
struct TransmissionMatrix {
  int num_nodes = 0;
  Eigen::MatrixXd values;  // N x N, entries >= 0, diagonal 0

  static TransmissionMatrix zero(int n) {
    return {n, Eigen::MatrixXd::Zero(n, n)};
  }
};

// How the non-activation factor of the cascade likelihood is evaluated.
// PaperLiteral uses (1 - f) with f the transmission density; Survival uses
// the proper survival function exp(-w * dt).
enum class LikelihoodMode { PaperLiteral, Survival };

// Factors are clamped into [kLikelihoodEps, 1 - kLikelihoodEps] before log.
constexpr double kLikelihoodEps = 1e-12;

struct LikelihoodStats {
  long degenerate_terms = 0;  // activations with no effective activator
};

// Exponential transmission density: w * exp(-w (tj - ti)) for ti < tj, 0
// otherwise.
double pair_density(double t_i, double t_j, double w);

double cascade_log_likelihood(const Cascade& c, const TransmissionMatrix& w, double window,
                              LikelihoodMode mode, LikelihoodStats* stats = nullptr);

double set_log_likelihood(const CascadeSet& set, const TransmissionMatrix& w,
                          LikelihoodMode mode, LikelihoodStats* stats = nullptr);

// Closed-form rate estimate: for each ordered pair (i, j) it pools the
// activation evidence sum(1 / (tj - ti)) over cascades with ti < tj <= T
// and censoring evidence sum(1 / (T - ti)) over cascades with ti <= T < tj
// (ti = T skipped), divided by the total number of qualifying cascades.
// Entries below `tau` are zeroed.
TransmissionMatrix closed_form_estimate(const CascadeSet& set, double tau = 0.0);

// Projected gradient ascent on set_log_likelihood, restricted to pairs
// that co-occur in some cascade. Gradients by central finite differences;
// negative entries are clipped to zero after every step. Returns the
// iterate with the best objective seen.
TransmissionMatrix mle_estimate(const CascadeSet& set, const TransmissionMatrix& init,
                                int steps, double step_size, LikelihoodMode mode);

// X = W / max(W), entries in [0, 1] (all-zero W maps to zero).
Eigen::MatrixXd feature_matrix(const TransmissionMatrix& w);

// (W + W^T) / 2, then scaled by 1 / max as in feature_matrix.
Eigen::MatrixXd symmetric_weights(const TransmissionMatrix& w);

// Text format: header "#N=<N>", then "i j w" triplets for nonzero entries
// sorted by (i, j), w with 9 significant digits.
void write_transmission_matrix(const TransmissionMatrix& w, std::ostream& out);
TransmissionMatrix read_transmission_matrix(std::istream& in);
void write_transmission_matrix_file(const TransmissionMatrix& w, const std::string& path);
TransmissionMatrix read_transmission_matrix_file(const std::string& path);

}  // namespace latentmesh
