#pragma once

#include <vector>

#include "sphnet/molecule.hpp"

namespace sphnet {

// Mean absolute deviation over all matrix entries.
double h_mae(const std::vector<double>& a, const std::vector<double>& b);

// Training objective: MAE + MSE over all entries.
double loss_mae_mse(const std::vector<double>& a, const std::vector<double>& b);

// Electron pairs: floor(sum Z / 2).
int occupied_count(const MoleculeGraph& mol);

// MAE over the lowest n_occ generalized eigenvalues of (H, S).
double epsilon_mae(const std::vector<double>& h_pred, const std::vector<double>& h_ref,
                   const std::vector<double>& overlap, int n, int n_occ);

// Mean over occupied orbitals of |cos| between predicted and reference
// eigenvectors in the S-weighted inner product. Reference eigenvalues closer
// than 1e-8 are treated as one degenerate cluster and compared through
// principal angles.
double psi_similarity(const std::vector<double>& h_pred, const std::vector<double>& h_ref,
                      const std::vector<double>& overlap, int n, int n_occ);

}  // namespace sphnet
