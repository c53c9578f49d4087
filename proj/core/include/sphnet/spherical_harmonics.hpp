#pragma once

#include <array>
#include <complex>
#include <vector>

namespace sphnet {

// Real spherical harmonics Y^l_m(r_hat) for l = 0..l_max, orthonormal on the
// unit sphere (integral of Y^2 over the sphere equals 1). Output[l] has 2l+1
// entries ordered m = -l..l. Depends only on the direction of r.
// Throws std::domain_error if r is the zero vector.
std::vector<std::vector<double>> real_spherical_harmonics(int l_max,
                                                          const std::array<double, 3>& r);

// Complex spherical harmonics in the Condon-Shortley convention, same
// normalization. Used as the analytic reference for the real basis.
std::vector<std::vector<std::complex<double>>> complex_spherical_harmonics(
    int l_max, const std::array<double, 3>& r);

// Gauss-Legendre nodes and weights on [-1, 1] (exact through degree 2n-1).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sphnet
