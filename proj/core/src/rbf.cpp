#include "sphnet/rbf.hpp"

#include <cmath>

#include "sphnet/errors.hpp"

namespace sphnet {

double cutoff_factor(double x, double c) {
  if (x >= c) return 0.0;
  if (x < 0.0) throw contract_error("cutoff_factor: negative distance");
  return std::exp(-x * x / ((c - x) * (c + x)));
}

std::vector<double> rbf(const RbfConfig& cfg, double r) {
  const int K = cfg.basis_size;
  if (K <= 0) throw config_error("rbf: basis size must be positive");
  std::vector<double> out(static_cast<size_t>(K), 0.0);
  if (r >= cfg.cutoff) return out;

  const double u = std::exp(-cfg.alpha * r);
  const double fc = cutoff_factor(r, cfg.cutoff);
  // binom(K-1, n) built incrementally to avoid factorial overflow.
  double binom = 1.0;
  for (int n = 0; n < K; ++n) {
    out[static_cast<size_t>(n)] =
        binom * std::pow(u, n) * std::pow(1.0 - u, K - 1 - n) * fc;
    binom *= static_cast<double>(K - 1 - n) / static_cast<double>(n + 1);
  }
  return out;
}

}  // namespace sphnet
