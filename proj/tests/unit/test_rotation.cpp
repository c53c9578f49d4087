#include <cmath>

#include "doctest.h"
#include "sphnet/rotation.hpp"
#include "sphnet/spherical_harmonics.hpp"

using namespace sphnet;

namespace {

std::array<double, 3> apply_r(const Rotation& R, const std::array<double, 3>& v) {
  return R.apply(v);
}

}  // namespace

TEST_CASE("rotation validation") {
  const Rotation id = Rotation::identity();
  CHECK(id.at(0, 0) == 1.0);
  const std::array<std::array<double, 3>, 3> scaled = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}};
  const std::array<std::array<double, 3>, 3> mirror = {{{1, 0, 0}, {0, 1, 0}, {0, 0, -1}}};
  CHECK_THROWS(Rotation(scaled));  // not orthogonal
  CHECK_THROWS(Rotation(mirror));  // det -1
}

TEST_CASE("Wigner-D is orthogonal and D(l=1) matches the vector rotation") {
  const Rotation R = Rotation::from_axis_angle({0.2, -0.5, 0.84}, 1.1);
  for (int l = 1; l <= 4; ++l) {
    const WignerD D = wigner_d(l, R);
    const int d = 2 * l + 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += D.at(k, i) * D.at(k, j);
        CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
      }
  }
  // l=1 real SH order is (y, z, x): D^1 equals R in that permuted basis.
  const WignerD D1 = wigner_d(1, R);
  const std::array<int, 3> perm = {1, 2, 0};  // (m=-1,0,1) -> (y,z,x)
  for (int a = 0; a < 3; ++a)
    for (int bidx = 0; bidx < 3; ++bidx)
      CHECK(D1.at(a, bidx) ==
            doctest::Approx(R.at(perm[static_cast<size_t>(a)], perm[static_cast<size_t>(bidx)]))
                .epsilon(1e-9));
}

TEST_CASE("Wigner-D represents the group: D(R1 R2) = D(R1) D(R2)") {
  const Rotation R1 = Rotation::random(7);
  const Rotation R2 = Rotation::random(8);
  const Rotation R12 = R1.compose(R2);
  for (int l = 1; l <= 3; ++l) {
    const WignerD A = wigner_d(l, R1);
    const WignerD B = wigner_d(l, R2);
    const WignerD C = wigner_d(l, R12);
    const int d = 2 * l + 1;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += A.at(i, k) * B.at(k, j);
        CHECK(C.at(i, j) == doctest::Approx(s).epsilon(1e-8));
      }
  }
}

TEST_CASE("spherical harmonics transform with Wigner-D: Y(R r) = D Y(r)") {
  const Rotation R = Rotation::random(11);
  const std::array<double, 3> r = {0.3, 0.8, -0.52};
  const auto y = real_spherical_harmonics(4, r);
  const auto y_rot = real_spherical_harmonics(4, apply_r(R, r));
  for (int l = 0; l <= 4; ++l) {
    const WignerD D = wigner_d(l, R);
    const int d = 2 * l + 1;
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += D.at(i, j) * y[static_cast<size_t>(l)][static_cast<size_t>(j)];
      CHECK(y_rot[static_cast<size_t>(l)][static_cast<size_t>(i)] ==
            doctest::Approx(s).epsilon(1e-9));
    }
  }
}

TEST_CASE("rotate acts block-diagonally on an equivariant vector") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  EquivariantVector v(lay);
  for (size_t i = 0; i < v.values.size(); ++i) v.values[i] = 0.1 * static_cast<double>(i) - 0.7;
  const Rotation R = Rotation::random(3);
  const EquivariantVector w = rotate(v, R);
  // l = 0 slices unchanged.
  CHECK(w.at(0, 0, 0) == v.at(0, 0, 0));
  CHECK(w.at(0, 1, 0) == v.at(0, 1, 0));
  // l = 2 norm preserved per channel.
  for (int c = 0; c < 2; ++c) {
    double n0 = 0.0, n1 = 0.0;
    for (int m = -2; m <= 2; ++m) {
      n0 += v.at(2, c, m) * v.at(2, c, m);
      n1 += w.at(2, c, m) * w.at(2, c, m);
    }
    CHECK(n1 == doctest::Approx(n0).epsilon(1e-10));
  }
}
