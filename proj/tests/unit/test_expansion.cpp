#include <cmath>
#include <random>

#include "doctest.h"
#include "sphnet/expansion.hpp"
#include "sphnet/molecule.hpp"
#include "sphnet/rotation.hpp"

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

// Block-diagonal Wigner-D over an orbital layout (multiplicity-1 entries).
std::vector<double> orbital_wigner(const IrrepsLayout& lay, const Rotation& R) {
  const int n = lay.total_dim();
  std::vector<double> D(static_cast<size_t>(n) * n, 0.0);
  for (int e = 0; e < lay.num_entries(); ++e) {
    const int l = lay.entry(e).l;
    const WignerD Dl = wigner_d(l, R);
    for (int c = 0; c < lay.entry(e).mul; ++c) {
      const int base = lay.index(e, c, -l);
      for (int i = 0; i < 2 * l + 1; ++i)
        for (int j = 0; j < 2 * l + 1; ++j)
          D[static_cast<size_t>((base + i) * n + base + j)] = Dl.at(i, j);
    }
  }
  return D;
}

}  // namespace

TEST_CASE("full-orbital expansion produces 14 x 14 blocks") {
  const IrrepsLayout input = IrrepsLayout::uniform(4, 4);
  const IrrepsLayout uni = BasisSpec::toy_svp().union_layout();
  const ExpansionPlan plan(input, uni, uni);
  CHECK(uni.total_dim() == 14);
  const auto f = random_vec(input, 1);
  const auto w = random_w(plan.weight_count(), 2);
  const auto bias = random_w(plan.bias_count(), 3);
  const auto M = tensor_expansion(plan, f, w, bias);
  CHECK(M.size() == 14u * 14u);
}

TEST_CASE("hydrogen extraction keeps a 5 x 5 block") {
  const BasisSpec basis = BasisSpec::toy_svp();
  CHECK(basis.extraction(1).size() == 5);
  CHECK(basis.extraction(1) == std::vector<int>{0, 1, 3, 4, 5});
  CHECK(basis.extraction(6).size() == 14);
  CHECK(basis.atom_dim(1) == 5);
  CHECK(basis.atom_dim(8) == 14);
}

TEST_CASE("expansion is equivariant: M(D f) = D_row M(f) D_col^T") {
  const IrrepsLayout input = IrrepsLayout::uniform(2, 4);
  const IrrepsLayout uni = BasisSpec::toy_svp().union_layout();
  const ExpansionPlan plan(input, uni, uni);
  const auto f = random_vec(input, 5);
  const auto w = random_w(plan.weight_count(), 6);
  const auto bias = random_w(plan.bias_count(), 7);

  const Rotation R = Rotation::random(9);
  const auto M = tensor_expansion(plan, f, w, bias);
  const auto M_rot = tensor_expansion(plan, rotate(f, R), w, bias);
  const auto D = orbital_wigner(uni, R);
  const int n = uni.total_dim();

  double max_err = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          s += D[static_cast<size_t>(i * n + a)] * M[static_cast<size_t>(a * n + b)] *
               D[static_cast<size_t>(j * n + b)];
      max_err = std::max(max_err, std::abs(M_rot[static_cast<size_t>(i * n + j)] - s));
    }
  CHECK(max_err < 1e-9);
}

TEST_CASE("bias enters only scalar-input paths") {
  const IrrepsLayout input = IrrepsLayout::uniform(2, 4);
  const IrrepsLayout uni = BasisSpec::toy_svp().union_layout();
  const ExpansionPlan plan(input, uni, uni);
  int scalar_paths = 0;
  for (const auto& p : plan.paths())
    if (p.l_in == 0) ++scalar_paths;
  CHECK(plan.bias_count() == scalar_paths);
  CHECK(scalar_paths == 3);  // (s,s), (p,p), (d,d)
}

TEST_CASE("input order above the feature layout is rejected") {
  const IrrepsLayout small = IrrepsLayout::uniform(2, 1);  // cannot reach |l_row - l_col| = 2
  const IrrepsLayout uni = BasisSpec::toy_svp().union_layout();
  CHECK_THROWS_AS(ExpansionPlan(small, uni, uni), config_error);
}

TEST_CASE("expansion backward matches finite differences") {
  const IrrepsLayout input = IrrepsLayout::uniform(2, 2);
  const IrrepsLayout rows({{1, 0}, {1, 1}});
  const ExpansionPlan plan(input, rows, rows);
  const auto f = random_vec(input, 11);
  const auto w = random_w(plan.weight_count(), 12);
  const auto bias = random_w(plan.bias_count(), 13);
  const int n = rows.total_dim();
  const auto g = random_w(n * n, 14);

  std::vector<double> gf, gw, gb;
  tensor_expansion_backward(plan, f, w, g, gf, gw, gb);

  auto objective = [&](const EquivariantVector& ff, const std::vector<double>& ww,
                       const std::vector<double>& bb) {
    const auto M = tensor_expansion(plan, ff, ww, bb);
    double s = 0.0;
    for (size_t i = 0; i < M.size(); ++i) s += g[i] * M[i];
    return s;
  };

  const double h = 1e-6;
  for (size_t i = 0; i < f.values.size(); i += 3) {
    auto fp = f, fm = f;
    fp.values[i] += h;
    fm.values[i] -= h;
    CHECK(gf[i] == doctest::Approx((objective(fp, w, bias) - objective(fm, w, bias)) / (2 * h))
                       .epsilon(1e-5));
  }
  for (size_t i = 0; i < w.size(); i += 5) {
    auto wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    CHECK(gw[i] == doctest::Approx((objective(f, wp, bias) - objective(f, wm, bias)) / (2 * h))
                       .epsilon(1e-5));
  }
  for (size_t i = 0; i < bias.size(); ++i) {
    auto bp = bias, bm = bias;
    bp[i] += h;
    bm[i] -= h;
    CHECK(gb[i] == doctest::Approx((objective(f, w, bp) - objective(f, w, bm)) / (2 * h))
                       .epsilon(1e-5));
  }
}
