#include <cmath>
#include <random>

#include "doctest.h"
#include "sphnet/rotation.hpp"
#include "sphnet/sph_linear.hpp"

using namespace sphnet;

namespace {

EquivariantVector random_vec(const IrrepsLayout& lay, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EquivariantVector v(lay);
  for (double& x : v.values) x = u(rng);
  return v;
}

std::vector<double> random_w(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(static_cast<size_t>(n));
  for (double& x : w) x = u(rng);
  return w;
}

}  // namespace

TEST_CASE("identity weights reproduce the input") {
  const IrrepsLayout lay = IrrepsLayout::uniform(3, 2);
  const SphLinearSpec spec(lay, lay);
  const auto x = random_vec(lay, 1);
  const auto out = sph_linear(spec, spec.identity_weights(),
                              std::vector<double>(spec.bias_count(), 0.0), x);
  for (size_t i = 0; i < x.values.size(); ++i) CHECK(out.values[i] == x.values[i]);
}

TEST_CASE("bias acts on l=0 only") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 1);
  const SphLinearSpec spec(lay, lay);
  CHECK(spec.bias_count() == 2);
  EquivariantVector x(lay);  // zeros
  const auto out =
      sph_linear(spec, spec.identity_weights(), std::vector<double>{1.5, -2.0}, x);
  CHECK(out.at(0, 0, 0) == 1.5);
  CHECK(out.at(0, 1, 0) == -2.0);
  for (int c = 0; c < 2; ++c)
    for (int m = -1; m <= 1; ++m) CHECK(out.at(1, c, m) == 0.0);
}

TEST_CASE("sph linear commutes with rotation") {
  const IrrepsLayout in = IrrepsLayout::uniform(3, 3);
  const IrrepsLayout out_lay = IrrepsLayout::uniform(2, 3);
  const SphLinearSpec spec(in, out_lay);
  const auto w = random_w(spec.weight_count(), 2);
  const std::vector<double> bias(static_cast<size_t>(spec.bias_count()), 0.0);
  const auto x = random_vec(in, 3);
  const Rotation R = Rotation::random(4);

  const auto lhs = sph_linear(spec, w, bias, rotate(x, R));
  const auto rhs = rotate(sph_linear(spec, w, bias, x), R);
  for (size_t i = 0; i < lhs.values.size(); ++i)
    CHECK(lhs.values[i] == doctest::Approx(rhs.values[i]).epsilon(1e-10));
}

TEST_CASE("orders never mix") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  const SphLinearSpec spec(lay, lay);
  const auto w = random_w(spec.weight_count(), 5);
  const std::vector<double> bias(static_cast<size_t>(spec.bias_count()), 0.0);
  EquivariantVector x(lay);
  x.at(1, 0, 0) = 1.0;  // only l=1 content
  const auto out = sph_linear(spec, w, bias, x);
  for (int c = 0; c < 2; ++c) {
    CHECK(out.at(0, c, 0) == 0.0);
    for (int m = -2; m <= 2; ++m) CHECK(out.at(2, c, m) == 0.0);
  }
}

TEST_CASE("backward matches finite differences") {
  const IrrepsLayout in = IrrepsLayout::uniform(3, 1);
  const IrrepsLayout out_lay = IrrepsLayout::uniform(2, 1);
  const SphLinearSpec spec(in, out_lay);
  const auto w = random_w(spec.weight_count(), 6);
  const auto bias = random_w(spec.bias_count(), 7);
  const auto x = random_vec(in, 8);
  const auto g = random_w(out_lay.total_dim(), 9);

  std::vector<double> gw, gb, gx;
  sph_linear_backward(spec, w, x, g, gw, gb, gx);

  auto objective = [&](const std::vector<double>& ww, const std::vector<double>& bb,
                       const EquivariantVector& xx) {
    const auto out = sph_linear(spec, ww, bb, xx);
    double s = 0.0;
    for (size_t i = 0; i < out.values.size(); ++i) s += g[i] * out.values[i];
    return s;
  };

  const double h = 1e-6;
  for (size_t i = 0; i < w.size(); ++i) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    CHECK(gw[i] == doctest::Approx((objective(wp, bias, x) - objective(wm, bias, x)) / (2 * h))
                       .epsilon(1e-6));
  }
  for (size_t i = 0; i < bias.size(); ++i) {
    auto bp = bias, bm = bias;
    bp[i] += h;
    bm[i] -= h;
    CHECK(gb[i] == doctest::Approx((objective(w, bp, x) - objective(w, bm, x)) / (2 * h))
                       .epsilon(1e-6));
  }
  for (size_t i = 0; i < x.values.size(); ++i) {
    auto xp = x, xm = x;
    xp.values[i] += h;
    xm.values[i] -= h;
    CHECK(gx[i] == doctest::Approx((objective(w, bias, xp) - objective(w, bias, xm)) / (2 * h))
                       .epsilon(1e-6));
  }
}
