#pragma once

#include <vector>

namespace sphnet {

// Eigenvalues ascending; eigenvectors are the columns of `vectors`
// (row-major n x n, column k pairs with eigenvalues[k]).
struct EigResult {
  int dim = 0;
  std::vector<double> eigenvalues;
  std::vector<double> vectors;
};

// Symmetric eigendecomposition by cyclic Jacobi rotations.
// Throws contract_error if A is not symmetric within 1e-10 (relative).
EigResult sym_eig(const std::vector<double>& A, int n);

// Lower Cholesky factor of an SPD matrix; throws contract_error naming the
// failing pivot when the matrix is not positive definite.
std::vector<double> cholesky(const std::vector<double>& S, int n);

// Generalized problem H C = S C diag(eps) via Cholesky reduction S = L L^T.
// Eigenvector columns are S-orthonormal.
EigResult gen_eig(const std::vector<double>& H, const std::vector<double>& S, int n);

}  // namespace sphnet
