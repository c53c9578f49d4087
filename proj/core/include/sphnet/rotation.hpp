#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sphnet/irreps.hpp"

namespace sphnet {

// Proper rotation: 3x3 orthonormal matrix with determinant +1.
class Rotation {
 public:
  Rotation();  // identity
  explicit Rotation(const std::array<std::array<double, 3>, 3>& m);

  static Rotation identity() { return Rotation(); }
  static Rotation from_axis_angle(const std::array<double, 3>& axis, double angle);
  // Uniformly distributed random rotation (deterministic in the seed).
  static Rotation random(std::uint64_t seed);

  std::array<double, 3> apply(const std::array<double, 3>& v) const;
  Rotation compose(const Rotation& other) const;  // this * other

  double at(int i, int j) const { return m_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }

 private:
  std::array<std::array<double, 3>, 3> m_;
};

// Wigner-D matrix of order l in the real spherical-harmonic basis:
// Y^l(R r_hat) = D * Y^l(r_hat). Row-major (2l+1)x(2l+1).
struct WignerD {
  int l = 0;
  std::vector<double> d;
  double at(int i, int j) const { return d[static_cast<size_t>(i * (2 * l + 1) + j)]; }
};

// Builds D^(l)(R) by least-squares fit of Y^l over generic sample directions.
WignerD wigner_d(int l, const Rotation& r);

// Applies the block-diagonal Wigner-D rotation per (entry, channel) slice.
EquivariantVector rotate(const EquivariantVector& x, const Rotation& r);

}  // namespace sphnet
