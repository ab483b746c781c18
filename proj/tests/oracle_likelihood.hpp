#pragma once

// Independent brute-force transcription of the cascade likelihood used as
// a test oracle. Deliberately written with plain nested loops over all
// node pairs and no helpers shared with the library implementation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "latentmesh/diffusion.hpp"

namespace latentmesh::testutil {

inline double oracle_log_likelihood(const Cascade& c, int n, const Eigen::MatrixXd& w,
                                    double window, bool survival_mode) {
  const double inf = std::numeric_limits<double>::infinity();
  const double eps = 1e-12;
  std::vector<double> t(n, inf);
  for (const auto& ev : c.events) t[ev.first] = ev.second;

  double total = 0.0;

  // Activation part: product over activated non-root nodes j of
  // (sum over earlier i of hazard(i->j)) * (product over earlier k of the
  // non-activation factor), every probability factor clamped before log.
  for (int j = 0; j < n; ++j) {
    if (t[j] > window || j == c.root) continue;
    double hazard = 0.0;
    double log_factors = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j || t[k] >= t[j]) continue;
      const double rate = w(k, j);
      const double dt = t[j] - t[k];
      const double density = rate * std::exp(-rate * dt);
      if (survival_mode) {
        const double s = std::min(std::max(std::exp(-rate * dt), eps), 1.0 - eps);
        hazard += rate;
        log_factors += std::log(s);
      } else {
        const double one_minus = std::min(std::max(1.0 - density, eps), 1.0 - eps);
        hazard += density / one_minus;
        log_factors += std::log(one_minus);
      }
    }
    total += std::log(std::max(hazard, eps)) + log_factors;
  }

  // Censoring part: product over (activated j, inactive l) pairs.
  for (int l = 0; l < n; ++l) {
    if (t[l] <= window) continue;
    for (int j = 0; j < n; ++j) {
      if (t[j] > window) continue;
      const double rate = w(j, l);
      const double dt = window - t[j];
      double factor;
      if (survival_mode)
        factor = std::exp(-rate * dt);
      else
        factor = 1.0 - rate * std::exp(-rate * dt);
      total += std::log(std::min(std::max(factor, eps), 1.0 - eps));
    }
  }
  return total;
}

}  // namespace latentmesh::testutil
