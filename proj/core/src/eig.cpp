#include "sphnet/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sphnet/errors.hpp"

namespace sphnet {

namespace {
double frob(const std::vector<double>& a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}
}  // namespace

EigResult sym_eig(const std::vector<double>& A, int n) {
  if (static_cast<int>(A.size()) != n * n) throw contract_error("sym_eig: size mismatch");
  const double scale = std::max(frob(A), 1e-300);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(A[static_cast<size_t>(i * n + j)] - A[static_cast<size_t>(j * n + i)]) >
          1e-10 * scale)
        throw contract_error("sym_eig: matrix not symmetric");

  std::vector<double> a = A;
  std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i * n + i)] = 1.0;

  const double tol = 1e-14 * scale;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[static_cast<size_t>(p * n + q)] * a[static_cast<size_t>(p * n + q)];
    if (std::sqrt(2.0 * off) < tol) break;

    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[static_cast<size_t>(p * n + q)];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[static_cast<size_t>(p * n + p)];
        const double aqq = a[static_cast<size_t>(q * n + q)];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a[static_cast<size_t>(k * n + p)];
          const double akq = a[static_cast<size_t>(k * n + q)];
          a[static_cast<size_t>(k * n + p)] = c * akp - s * akq;
          a[static_cast<size_t>(k * n + q)] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[static_cast<size_t>(p * n + k)];
          const double aqk = a[static_cast<size_t>(q * n + k)];
          a[static_cast<size_t>(p * n + k)] = c * apk - s * aqk;
          a[static_cast<size_t>(q * n + k)] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[static_cast<size_t>(k * n + p)];
          const double vkq = v[static_cast<size_t>(k * n + q)];
          v[static_cast<size_t>(k * n + p)] = c * vkp - s * vkq;
          v[static_cast<size_t>(k * n + q)] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return a[static_cast<size_t>(x * n + x)] < a[static_cast<size_t>(y * n + y)];
  });

  EigResult r;
  r.dim = n;
  r.eigenvalues.resize(static_cast<size_t>(n));
  r.vectors.assign(static_cast<size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    const int src = order[static_cast<size_t>(k)];
    r.eigenvalues[static_cast<size_t>(k)] = a[static_cast<size_t>(src * n + src)];
    for (int i = 0; i < n; ++i)
      r.vectors[static_cast<size_t>(i * n + k)] = v[static_cast<size_t>(i * n + src)];
  }
  return r;
}

std::vector<double> cholesky(const std::vector<double>& S, int n) {
  if (static_cast<int>(S.size()) != n * n) throw contract_error("cholesky: size mismatch");
  std::vector<double> L(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = S[static_cast<size_t>(i * n + j)];
      for (int k = 0; k < j; ++k)
        s -= L[static_cast<size_t>(i * n + k)] * L[static_cast<size_t>(j * n + k)];
      if (i == j) {
        if (s <= 0.0)
          throw contract_error("cholesky: matrix not positive definite at pivot " +
                               std::to_string(i));
        L[static_cast<size_t>(i * n + i)] = std::sqrt(s);
      } else {
        L[static_cast<size_t>(i * n + j)] = s / L[static_cast<size_t>(j * n + j)];
      }
    }
  }
  return L;
}

EigResult gen_eig(const std::vector<double>& H, const std::vector<double>& S, int n) {
  const std::vector<double> L = cholesky(S, n);

  // A = L^{-1} H L^{-T}: forward-solve columns, then rows.
  std::vector<double> T(static_cast<size_t>(n) * n, 0.0);
  for (int col = 0; col < n; ++col)
    for (int i = 0; i < n; ++i) {
      double s = H[static_cast<size_t>(i * n + col)];
      for (int k = 0; k < i; ++k) s -= L[static_cast<size_t>(i * n + k)] * T[static_cast<size_t>(k * n + col)];
      T[static_cast<size_t>(i * n + col)] = s / L[static_cast<size_t>(i * n + i)];
    }
  std::vector<double> A(static_cast<size_t>(n) * n, 0.0);
  for (int row = 0; row < n; ++row)
    for (int j = 0; j < n; ++j) {
      double s = T[static_cast<size_t>(row * n + j)];
      for (int k = 0; k < j; ++k) s -= L[static_cast<size_t>(j * n + k)] * A[static_cast<size_t>(row * n + k)];
      A[static_cast<size_t>(row * n + j)] = s / L[static_cast<size_t>(j * n + j)];
    }
  // Symmetrize away round-off before Jacobi.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double m = 0.5 * (A[static_cast<size_t>(i * n + j)] + A[static_cast<size_t>(j * n + i)]);
      A[static_cast<size_t>(i * n + j)] = m;
      A[static_cast<size_t>(j * n + i)] = m;
    }

  EigResult inner = sym_eig(A, n);

  // C = L^{-T} Y: back-substitute each column.
  EigResult r;
  r.dim = n;
  r.eigenvalues = inner.eigenvalues;
  r.vectors.assign(static_cast<size_t>(n) * n, 0.0);
  for (int col = 0; col < n; ++col)
    for (int i = n - 1; i >= 0; --i) {
      double s = inner.vectors[static_cast<size_t>(i * n + col)];
      for (int k = i + 1; k < n; ++k)
        s -= L[static_cast<size_t>(k * n + i)] * r.vectors[static_cast<size_t>(k * n + col)];
      r.vectors[static_cast<size_t>(i * n + col)] = s / L[static_cast<size_t>(i * n + i)];
    }
  return r;
}

}  // namespace sphnet
