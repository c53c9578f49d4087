#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace sphnet {

// Complex Clebsch-Gordan coefficient <l1 m1 l2 m2 | l3 m3> (Condon-Shortley),
// computed with the Racah closed form in log-factorial arithmetic.
double complex_cg(int l1, int m1, int l2, int m2, int l3, int m3);

// Unitary change of basis from complex to real spherical harmonics at order
// l: y_real = U y_complex. Row index is the real m, column the complex m,
// both stored -l..l. Condon-Shortley convention on the complex side.
std::vector<std::complex<double>> complex_to_real_sh_transform(int l);

// Real-basis CG block for the triple (l1,l2,l3), dense with shape
// (2l1+1) x (2l2+1) x (2l3+1), indexed [m1][m2][m3] row-major. Normalized so
// that sum_{m1,m2} C^2 = 1 for every m3; the overall sign of each block is
// fixed by making its first nonzero entry (lexicographic scan) positive.
// Throws std::domain_error if the triangle rule is violated.
std::vector<double> clebsch_gordan(int l1, int l2, int l3);

// Cache of real CG blocks. Thread-safe for concurrent readers; blocks are
// built under a lock on first use and never mutated afterwards.
class CGTable {
 public:
  const std::vector<double>& block(int l1, int l2, int l3) const;
  static CGTable& instance();

 private:
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int>, std::vector<double>> blocks_;
};

}  // namespace sphnet
