#include "sphnet/spherical_harmonics.hpp"

#include <cmath>
#include <stdexcept>

namespace sphnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Associated Legendre P_l^m(x) for m = 0..l, without the Condon-Shortley
// phase. plm[l][m], sin_theta = sqrt(1-x^2) passed explicitly for stability.
std::vector<std::vector<double>> assoc_legendre(int l_max, double x, double sx) {
  std::vector<std::vector<double>> p(static_cast<size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) p[static_cast<size_t>(l)].assign(static_cast<size_t>(l) + 1, 0.0);
  p[0][0] = 1.0;
  for (int m = 1; m <= l_max; ++m)
    p[static_cast<size_t>(m)][static_cast<size_t>(m)] =
        p[static_cast<size_t>(m - 1)][static_cast<size_t>(m - 1)] * (2 * m - 1) * sx;
  for (int m = 0; m < l_max; ++m)
    p[static_cast<size_t>(m + 1)][static_cast<size_t>(m)] =
        (2 * m + 1) * x * p[static_cast<size_t>(m)][static_cast<size_t>(m)];
  for (int m = 0; m <= l_max; ++m)
    for (int l = m + 2; l <= l_max; ++l)
      p[static_cast<size_t>(l)][static_cast<size_t>(m)] =
          ((2 * l - 1) * x * p[static_cast<size_t>(l - 1)][static_cast<size_t>(m)] -
           (l + m - 1) * p[static_cast<size_t>(l - 2)][static_cast<size_t>(m)]) /
          (l - m);
  return p;
}

double norm_klm(int l, int m) {
  // sqrt((2l+1)/(4pi) * (l-m)!/(l+m)!) via a running product, exact enough
  // for l <= 8.
  double ratio = 1.0;
  for (int i = l - m + 1; i <= l + m; ++i) ratio /= static_cast<double>(i);
  return std::sqrt((2 * l + 1) / (4.0 * kPi) * ratio);
}

void unit_direction(const std::array<double, 3>& r, double& ct, double& st, double& phi) {
  const double n = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  if (n == 0.0) throw std::domain_error("spherical harmonics: zero-length direction");
  ct = r[2] / n;
  if (ct > 1.0) ct = 1.0;
  if (ct < -1.0) ct = -1.0;
  st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  phi = std::atan2(r[1], r[0]);
}

}  // namespace

std::vector<std::vector<double>> real_spherical_harmonics(int l_max,
                                                          const std::array<double, 3>& r) {
  double ct, st, phi;
  unit_direction(r, ct, st, phi);
  const auto p = assoc_legendre(l_max, ct, st);

  std::vector<std::vector<double>> y(static_cast<size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    auto& yl = y[static_cast<size_t>(l)];
    yl.assign(static_cast<size_t>(2 * l) + 1, 0.0);
    yl[static_cast<size_t>(l)] = norm_klm(l, 0) * p[static_cast<size_t>(l)][0];
    for (int m = 1; m <= l; ++m) {
      const double k = std::sqrt(2.0) * norm_klm(l, m) * p[static_cast<size_t>(l)][static_cast<size_t>(m)];
      yl[static_cast<size_t>(l + m)] = k * std::cos(m * phi);
      yl[static_cast<size_t>(l - m)] = k * std::sin(m * phi);
    }
  }
  return y;
}

std::vector<std::vector<std::complex<double>>> complex_spherical_harmonics(
    int l_max, const std::array<double, 3>& r) {
  double ct, st, phi;
  unit_direction(r, ct, st, phi);
  const auto p = assoc_legendre(l_max, ct, st);

  std::vector<std::vector<std::complex<double>>> y(static_cast<size_t>(l_max) + 1);
  for (int l = 0; l <= l_max; ++l) {
    auto& yl = y[static_cast<size_t>(l)];
    yl.assign(static_cast<size_t>(2 * l) + 1, {0.0, 0.0});
    for (int m = 0; m <= l; ++m) {
      const double k = norm_klm(l, m) * p[static_cast<size_t>(l)][static_cast<size_t>(m)];
      const std::complex<double> e(std::cos(m * phi), std::sin(m * phi));
      const double cs = (m % 2 == 0) ? 1.0 : -1.0;  // Condon-Shortley
      yl[static_cast<size_t>(l + m)] = cs * k * e;
      yl[static_cast<size_t>(l - m)] = k * std::conj(e);
    }
  }
  return y;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<size_t>(i)] = x;
    weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace sphnet
