#include "sphnet/metrics.hpp"

#include <cmath>

#include "sphnet/eig.hpp"
#include "sphnet/errors.hpp"

namespace sphnet {

double h_mae(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw contract_error("h_mae: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double loss_mae_mse(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw contract_error("loss: size mismatch");
  double mae = 0.0, mse = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mae += std::abs(d);
    mse += d * d;
  }
  return (mae + mse) / static_cast<double>(a.size());
}

int occupied_count(const MoleculeGraph& mol) {
  int z_sum = 0;
  for (int z : mol.atomic_numbers()) z_sum += z;
  return z_sum / 2;
}

double epsilon_mae(const std::vector<double>& h_pred, const std::vector<double>& h_ref,
                   const std::vector<double>& overlap, int n, int n_occ) {
  if (n_occ <= 0 || n_occ > n) throw contract_error("epsilon_mae: occupied count out of range");
  const EigResult p = gen_eig(h_pred, overlap, n);
  const EigResult r = gen_eig(h_ref, overlap, n);
  double s = 0.0;
  for (int k = 0; k < n_occ; ++k)
    s += std::abs(p.eigenvalues[static_cast<size_t>(k)] - r.eigenvalues[static_cast<size_t>(k)]);
  return s / n_occ;
}

namespace {

constexpr double kDegenerateGap = 1e-8;

// c_a^T S c_b with columns a of P and b of R.
double s_inner(const std::vector<double>& P, int a, const std::vector<double>& R, int b,
               const std::vector<double>& S, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double si = 0.0;
    for (int j = 0; j < n; ++j)
      si += S[static_cast<size_t>(i * n + j)] * R[static_cast<size_t>(j * n + b)];
    s += P[static_cast<size_t>(i * n + a)] * si;
  }
  return s;
}

}  // namespace

double psi_similarity(const std::vector<double>& h_pred, const std::vector<double>& h_ref,
                      const std::vector<double>& overlap, int n, int n_occ) {
  if (n_occ <= 0 || n_occ > n) throw contract_error("psi: occupied count out of range");
  const EigResult p = gen_eig(h_pred, overlap, n);
  const EigResult r = gen_eig(h_ref, overlap, n);

  double acc = 0.0;
  int k = 0;
  while (k < n_occ) {
    // Degenerate cluster of the reference spectrum starting at k.
    int end = k + 1;
    while (end < n_occ &&
           r.eigenvalues[static_cast<size_t>(end)] - r.eigenvalues[static_cast<size_t>(end - 1)] <
               kDegenerateGap)
      ++end;
    const int d = end - k;
    if (d == 1) {
      acc += std::abs(s_inner(p.vectors, k, r.vectors, k, overlap, n));
    } else {
      // Principal angles: singular values of M[a][b] = <p_{k+a}, S r_{k+b}>.
      std::vector<double> M(static_cast<size_t>(d) * d, 0.0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          M[static_cast<size_t>(a * d + b)] = s_inner(p.vectors, k + a, r.vectors, k + b, overlap, n);
      // Singular values via eigenvalues of M^T M.
      std::vector<double> G(static_cast<size_t>(d) * d, 0.0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double s = 0.0;
          for (int c = 0; c < d; ++c)
            s += M[static_cast<size_t>(c * d + a)] * M[static_cast<size_t>(c * d + b)];
          G[static_cast<size_t>(a * d + b)] = s;
        }
      const EigResult gev = sym_eig(G, d);
      for (int a = 0; a < d; ++a)
        acc += std::sqrt(std::max(0.0, gev.eigenvalues[static_cast<size_t>(a)]));
    }
    k = end;
  }
  return acc / n_occ;
}

}  // namespace sphnet
