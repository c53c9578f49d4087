#pragma once

#include <vector>

namespace sphnet {

// Smooth cutoff factor: exp(-x^2 / ((c - x)(c + x))) for 0 <= x < c, else 0.
// Equals 1 at x = 0 and vanishes with all derivatives at x = c.
double cutoff_factor(double x, double c);

// Exponential Bernstein radial basis: with u = exp(-alpha r),
//   b_n(r) = binom(K-1, n) u^n (1-u)^(K-1-n) * cutoff_factor(r, c)
// for n = 0..K-1. Partition of unity before the cutoff factor.
struct RbfConfig {
  int basis_size = 16;   // K
  double alpha = 0.8;    // 1/Angstrom
  double cutoff = 5.0;   // Angstrom
};

std::vector<double> rbf(const RbfConfig& cfg, double r);

}  // namespace sphnet
