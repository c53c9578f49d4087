#include <cmath>
#include <random>

#include "doctest.h"
#include "sphnet/rotation.hpp"
#include "sphnet/spherical_harmonics.hpp"
#include "sphnet/tensor_product.hpp"

using namespace sphnet;

namespace {

EquivariantVector random_vec(const IrrepsLayout& lay, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EquivariantVector v(lay);
  for (double& x : v.values) x = u(rng);
  return v;
}

std::vector<double> random_weights(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(static_cast<size_t>(n));
  for (double& x : w) x = u(rng);
  return w;
}

}  // namespace

TEST_CASE("dense cost enumeration") {
  const IrrepsLayout one1 = IrrepsLayout::uniform(1, 1);
  const auto plan1 = build_plan(one1, one1, one1, enumerate_paths(1));
  // L=1: (000)=1,(011)=9,(101)=9,(110)=9,(111)=27 -> 55
  CHECK(dense_cost(plan1) == 55);

  const IrrepsLayout one2 = IrrepsLayout::uniform(1, 2);
  const auto plan2 = build_plan(one2, one2, one2, enumerate_paths(2));
  CHECK(dense_cost(plan2) == 615);

  // Brute-force oracle.
  std::int64_t expect = 0;
  for (const auto& [l1, l2, l3] : enumerate_paths(2))
    expect += (2 * l1 + 1) * (2 * l2 + 1) * (2 * l3 + 1);
  CHECK(dense_cost(plan2) == expect);

  // Channels scale the cost linearly.
  const IrrepsLayout c4 = IrrepsLayout::uniform(4, 2);
  CHECK(dense_cost(build_plan(c4, c4, c4, enumerate_paths(2))) == 4 * 615);
}

TEST_CASE("tensor product is equivariant") {
  const IrrepsLayout lay = IrrepsLayout::uniform(3, 3);
  const auto plan = build_plan(lay, lay, lay, enumerate_paths(3));
  const auto x = random_vec(lay, 1);
  const auto y = random_vec(lay, 2);
  const auto w = random_weights(plan.weight_count(), 3);

  const Rotation R = Rotation::random(5);
  const auto lhs = tp_forward(plan, rotate(x, R), rotate(y, R), w);
  const auto rhs = rotate(tp_forward(plan, x, y, w), R);
  double max_err = 0.0;
  for (size_t i = 0; i < lhs.values.size(); ++i)
    max_err = std::max(max_err, std::abs(lhs.values[i] - rhs.values[i]));
  CHECK(max_err < 1e-10);
}

TEST_CASE("broken CG table destroys equivariance (negative control)") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  auto plan = build_plan(lay, lay, lay, enumerate_paths(2));
  plan.debug_perturb_cg(3, 1.5);
  const auto x = random_vec(lay, 1);
  const auto y = random_vec(lay, 2);
  const auto w = random_weights(plan.weight_count(), 3);
  const Rotation R = Rotation::random(5);
  const auto lhs = tp_forward(plan, rotate(x, R), rotate(y, R), w);
  const auto rhs = rotate(tp_forward(plan, x, y, w), R);
  double max_err = 0.0;
  for (size_t i = 0; i < lhs.values.size(); ++i)
    max_err = std::max(max_err, std::abs(lhs.values[i] - rhs.values[i]));
  CHECK(max_err > 1e-6);
}

TEST_CASE("sub-plan equals zero-weighted full plan bit-exactly") {
  const IrrepsLayout lay = IrrepsLayout::uniform(4, 3);
  const auto universe = enumerate_paths(3);
  const auto full = build_plan(lay, lay, lay, universe);
  // Keep every third path.
  std::vector<PathTriple> subset;
  std::vector<int> kept;
  for (size_t i = 0; i < universe.size(); i += 3) {
    subset.push_back(universe[i]);
    kept.push_back(static_cast<int>(i));
  }
  const auto sub = build_plan(lay, lay, lay, subset);

  const auto x = random_vec(lay, 10);
  const auto y = random_vec(lay, 11);
  const int C = full.channels();
  const auto w_sub = random_weights(sub.weight_count(), 12);
  std::vector<double> w_full(static_cast<size_t>(full.weight_count()), 0.0);
  for (size_t p = 0; p < kept.size(); ++p)
    for (int c = 0; c < C; ++c)
      w_full[static_cast<size_t>(kept[p] * C + c)] = w_sub[p * static_cast<size_t>(C) + static_cast<size_t>(c)];

  const auto a = tp_forward(sub, x, y, w_sub);
  const auto b = tp_forward(full, x, y, w_full);
  for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("bilinearity and weight linearity") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  const auto plan = build_plan(lay, lay, lay, enumerate_paths(2));
  const auto x = random_vec(lay, 20);
  const auto y = random_vec(lay, 21);
  auto w = random_weights(plan.weight_count(), 22);

  auto x2 = x;
  for (double& v : x2.values) v *= 2.0;
  const auto base = tp_forward(plan, x, y, w);
  const auto doubled = tp_forward(plan, x2, y, w);
  for (size_t i = 0; i < base.values.size(); ++i)
    CHECK(doubled.values[i] == doctest::Approx(2.0 * base.values[i]).epsilon(1e-12));

  auto w2 = w;
  for (double& v : w2) v *= -3.0;
  const auto scaled = tp_forward(plan, x, y, w2);
  for (size_t i = 0; i < base.values.size(); ++i)
    CHECK(scaled.values[i] == doctest::Approx(-3.0 * base.values[i]).epsilon(1e-12));
}

TEST_CASE("SH-operand broadcast: in2 with multiplicity 1") {
  const IrrepsLayout lay = IrrepsLayout::uniform(3, 2);
  std::vector<IrrepsEntry> ye = {{1, 0}, {1, 1}, {1, 2}};
  const IrrepsLayout ylay((std::vector<IrrepsEntry>(ye)));
  const auto plan = build_plan(lay, ylay, lay, enumerate_paths(2));
  const auto x = random_vec(lay, 30);
  EquivariantVector y(ylay);
  const auto sh = real_spherical_harmonics(2, {0.6, 0.0, 0.8});
  size_t k = 0;
  for (const auto& slice : sh)
    for (double v : slice) y.values[k++] = v;
  const auto w = random_weights(plan.weight_count(), 31);
  const auto out = tp_forward(plan, x, y, w);
  CHECK(out.values.size() == static_cast<size_t>(lay.total_dim()));
  // Equivariance with the broadcast operand.
  const Rotation R = Rotation::random(33);
  const auto lhs = tp_forward(plan, rotate(x, R), rotate(y, R), w);
  const auto rhs = rotate(out, R);
  for (size_t i = 0; i < lhs.values.size(); ++i)
    CHECK(lhs.values[i] == doctest::Approx(rhs.values[i]).epsilon(1e-9));
}

TEST_CASE("backward matches central finite differences") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  const auto plan = build_plan(lay, lay, lay, enumerate_paths(2));
  const auto x = random_vec(lay, 40);
  const auto y = random_vec(lay, 41);
  const auto w = random_weights(plan.weight_count(), 42);
  const auto g = random_weights(lay.total_dim(), 43);  // upstream gradient

  std::vector<double> gx, gy, gw;
  tp_backward(plan, x, y, w, g, gx, gy, gw);

  auto objective = [&](const EquivariantVector& xx, const EquivariantVector& yy,
                       const std::vector<double>& ww) {
    const auto out = tp_forward(plan, xx, yy, ww);
    double s = 0.0;
    for (size_t i = 0; i < out.values.size(); ++i) s += g[i] * out.values[i];
    return s;
  };

  const double h = 1e-6;
  for (size_t i = 0; i < x.values.size(); i += 7) {
    auto xp = x, xm = x;
    xp.values[i] += h;
    xm.values[i] -= h;
    const double fd = (objective(xp, y, w) - objective(xm, y, w)) / (2 * h);
    CHECK(gx[i] == doctest::Approx(fd).epsilon(1e-5));
  }
  for (size_t i = 0; i < w.size(); i += 11) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    const double fd = (objective(x, y, wp) - objective(x, y, wm)) / (2 * h);
    CHECK(gw[i] == doctest::Approx(fd).epsilon(1e-5));
  }
  for (size_t i = 0; i < y.values.size(); i += 5) {
    auto yp = y, ym = y;
    yp.values[i] += h;
    ym.values[i] -= h;
    const double fd = (objective(x, yp, w) - objective(x, ym, w)) / (2 * h);
    CHECK(gy[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("invalid plans are rejected") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 1);
  // Output order absent from the layout.
  CHECK_THROWS(build_plan(lay, lay, lay, {{1, 1, 2}}));
  // Channel misalignment: in2 multiplicity neither 1 nor C.
  const IrrepsLayout bad = IrrepsLayout::uniform(3, 1);
  CHECK_THROWS(build_plan(lay, bad, lay, {{0, 0, 0}}));
}
