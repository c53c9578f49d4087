#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "sphnet/autograd.hpp"
#include "sphnet/tensor_product.hpp"

using namespace sphnet;
using namespace sphnet::ad;

namespace {

std::vector<double> rand_vec(size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Checks the gradient of a scalar-valued graph against central finite
// differences on every input vector.
void check_grad(const std::function<int(Tape&, const std::vector<int>&)>& build,
                std::vector<std::vector<double>> inputs, double tol = 1e-6) {
  Tape t;
  std::vector<int> ids;
  for (const auto& in : inputs) ids.push_back(constant(t, in));
  const int root = build(t, ids);
  REQUIRE(t.val(root).size() == 1);
  t.backward(root);

  const double h = 1e-6;
  for (size_t k = 0; k < inputs.size(); ++k) {
    for (size_t i = 0; i < inputs[k].size(); ++i) {
      auto eval = [&](double delta) {
        auto pert = inputs;
        pert[k][i] += delta;
        Tape tt;
        std::vector<int> pids;
        for (const auto& in : pert) pids.push_back(constant(tt, in));
        return tt.val(build(tt, pids))[0];
      };
      const double fd = (eval(h) - eval(-h)) / (2 * h);
      const double an = t.grad(ids[k])[i];
      CHECK(std::abs(fd - an) <= tol * std::max(1.0, std::abs(fd)));
    }
  }
}

// Reduce a vector node to a scalar with fixed random weights so every output
// component contributes to the objective.
int weighted_sum(Tape& t, int a, unsigned seed) {
  const auto w = rand_vec(t.val(a).size(), seed);
  const int wn = constant(t, w);
  const int prod = ewmul(t, a, wn);
  std::vector<double> ones(1, 0.0);
  // sum via linear with a 1 x n all-ones matrix
  const int onesw = constant(t, std::vector<double>(t.val(prod).size(), 1.0));
  return linear(t, onesw, prod, 1, static_cast<int>(t.val(prod).size()));
}

}  // namespace

TEST_CASE("elementwise ops match finite differences") {
  check_grad([](Tape& t, const std::vector<int>& in) {
    int x = add(t, in[0], in[1]);
    x = sub(t, x, in[2]);
    x = ewmul(t, x, in[1]);
    x = scale(t, x, 0.7);
    x = sigmoid(t, x);
    return weighted_sum(t, x, 11);
  },
             {rand_vec(6, 1), rand_vec(6, 2), rand_vec(6, 3)});
}

TEST_CASE("sum_many, concat, slice, gather, scatter_sum") {
  check_grad([](Tape& t, const std::vector<int>& in) {
    const int s = sum_many(t, {in[0], in[1], in[2]});
    const int c = concat(t, {s, in[0]});
    const int sl = slice(t, c, 2, 6);
    const int g = gather(t, sl, {0, 0, 3, 5, 1});
    const int sc = scatter_sum(t, 4, {{g, {0, 1, 1, 3, 2}}, {sl, {0, 1, 2, 3, 0, 1}}});
    return weighted_sum(t, sc, 12);
  },
             {rand_vec(5, 4), rand_vec(5, 5), rand_vec(5, 6)});
}

TEST_CASE("group_scale and linear") {
  check_grad([](Tape& t, const std::vector<int>& in) {
    const int gs = group_scale(t, in[0], in[1], 3);  // 6 = 2 * 3
    const int y = linear(t, in[2], gs, 2, 6, in[3]);
    return weighted_sum(t, y, 13);
  },
             {rand_vec(6, 7), rand_vec(2, 8), rand_vec(12, 9), rand_vec(2, 10)});
}

TEST_CASE("mae_mse_loss value and gradient") {
  Tape t;
  const int a = constant(t, {1.0, -2.0, 0.5});
  const int b = constant(t, {0.5, -1.0, 1.5});
  const int loss = mae_mse_loss(t, a, b);
  // diffs: 0.5, -1.0, -1.0 ; mae = 2.5/3 ; mse = 2.25/3
  CHECK(t.val(loss)[0] == doctest::Approx((2.5 + 2.25) / 3.0).epsilon(1e-12));
  check_grad([](Tape& tt, const std::vector<int>& in) { return mae_mse_loss(tt, in[0], in[1]); },
             {rand_vec(8, 20), rand_vec(8, 21)});
}

TEST_CASE("op_tp, op_sph_linear and op_norm match finite differences") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  const TensorProductPlan plan = build_plan(lay, lay, lay, enumerate_paths(2));
  check_grad([&](Tape& t, const std::vector<int>& in) {
    const int z = op_tp(t, plan, in[0], in[1], in[2]);
    const int n = op_norm(t, lay, z);
    return weighted_sum(t, n, 14);
  },
             {rand_vec(static_cast<size_t>(lay.total_dim()), 15, 0.2, 1.0),
              rand_vec(static_cast<size_t>(lay.total_dim()), 16, 0.2, 1.0),
              rand_vec(static_cast<size_t>(plan.weight_count()), 17)},
             1e-4);

  const SphLinearSpec spec(lay, lay);
  check_grad([&](Tape& t, const std::vector<int>& in) {
    const int y = op_sph_linear(t, spec, in[0], in[1], in[2]);
    return weighted_sum(t, y, 18);
  },
             {rand_vec(static_cast<size_t>(spec.weight_count()), 22),
              rand_vec(static_cast<size_t>(spec.bias_count()), 23),
              rand_vec(static_cast<size_t>(lay.total_dim()), 24)});
}

TEST_CASE("op_inner_per_order values and gradient") {
  const IrrepsLayout lay = IrrepsLayout::uniform(2, 2);
  Tape t;
  const auto x = rand_vec(static_cast<size_t>(lay.total_dim()), 30);
  const auto y = rand_vec(static_cast<size_t>(lay.total_dim()), 31);
  const int r = op_inner_per_order(t, lay, constant(t, x), constant(t, y));
  REQUIRE(t.val(r).size() == 4);  // channels * lmax = 2 * 2

  // Oracle: brute-force inner products from the layout.
  EquivariantVector xv(lay), yv(lay);
  xv.values = x;
  yv.values = y;
  int out_i = 0;
  for (int l = 1; l <= 2; ++l)
    for (int c = 0; c < 2; ++c) {
      double dot = 0.0;
      for (int m = -l; m <= l; ++m) dot += xv.at(l, c, m) * yv.at(l, c, m);
      CHECK(t.val(r)[static_cast<size_t>(out_i++)] == doctest::Approx(dot).epsilon(1e-12));
    }

  check_grad([&](Tape& tt, const std::vector<int>& in) {
    return weighted_sum(tt, op_inner_per_order(tt, lay, in[0], in[1]), 32);
  },
             {x, y});
}

TEST_CASE("binding leaf is memoized, frozen blocks gradients, harvest accumulates") {
  ParamStore store;
  const int p = store.add("p", {1.0, 2.0});
  Tape t;
  Binding b(t, store);
  const int l1 = b.leaf(p);
  const int l2 = b.leaf(p);
  CHECK(l1 == l2);
  const int f = b.frozen(p);
  CHECK(f != l1);

  const int y = add(t, ewmul(t, l1, l1), f);  // dy/dp = 2p through leaf only
  const int ones = constant(t, {1.0, 1.0});
  const int s = ewmul(t, y, ones);
  const int onesw = constant(t, std::vector<double>(2, 1.0));
  const int root = linear(t, onesw, s, 1, 2);
  t.backward(root);
  b.harvest();
  CHECK(store.at(p).grad[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(store.at(p).grad[1] == doctest::Approx(4.0).epsilon(1e-12));

  b.harvest();  // harvest accumulates leaf grads again
  CHECK(store.at(p).grad[0] == doctest::Approx(4.0).epsilon(1e-12));
}
