#include "sphnet/rotation.hpp"

#include <cmath>
#include <stdexcept>

#include "sphnet/spherical_harmonics.hpp"

namespace sphnet {

namespace {

constexpr double kOrthoTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& s) {
  return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

// Deterministic, roughly uniform sample directions (Fibonacci sphere).
std::array<double, 3> fib_direction(int i, int n, double offset) {
  const double golden = 2.399963229728653;  // 2*pi*(1 - 1/phi)
  const double z = 1.0 - 2.0 * (i + 0.5) / n;
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  const double phi = golden * i + offset;
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

// Solves the SPD system A x = b in place via Cholesky; returns false if a
// pivot falls below tolerance.
bool spd_solve(std::vector<double>& a, std::vector<double>& b, int n, int nrhs) {
  for (int j = 0; j < n; ++j) {
    double diag = a[static_cast<size_t>(j * n + j)];
    for (int k = 0; k < j; ++k) diag -= a[static_cast<size_t>(j * n + k)] * a[static_cast<size_t>(j * n + k)];
    if (diag < 1e-10) return false;
    const double lj = std::sqrt(diag);
    a[static_cast<size_t>(j * n + j)] = lj;
    for (int i = j + 1; i < n; ++i) {
      double v = a[static_cast<size_t>(i * n + j)];
      for (int k = 0; k < j; ++k) v -= a[static_cast<size_t>(i * n + k)] * a[static_cast<size_t>(j * n + k)];
      a[static_cast<size_t>(i * n + j)] = v / lj;
    }
  }
  for (int r = 0; r < nrhs; ++r) {
    double* x = &b[static_cast<size_t>(r * n)];
    for (int i = 0; i < n; ++i) {
      double v = x[i];
      for (int k = 0; k < i; ++k) v -= a[static_cast<size_t>(i * n + k)] * x[k];
      x[i] = v / a[static_cast<size_t>(i * n + i)];
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = x[i];
      for (int k = i + 1; k < n; ++k) v -= a[static_cast<size_t>(k * n + i)] * x[k];
      x[i] = v / a[static_cast<size_t>(i * n + i)];
    }
  }
  return true;
}

}  // namespace

Rotation::Rotation() : m_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

Rotation::Rotation(const std::array<std::array<double, 3>, 3>& m) : m_(m) {
  // R^T R = I and det R = +1, both within 1e-12.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += m_[static_cast<size_t>(k)][static_cast<size_t>(i)] * m_[static_cast<size_t>(k)][static_cast<size_t>(j)];
      const double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - expect) > 1e-10)
        throw contract_error("Rotation: matrix is not orthonormal");
    }
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (std::abs(det - 1.0) > 1e-10) throw contract_error("Rotation: determinant is not +1");
  (void)kOrthoTol;
}

Rotation Rotation::from_axis_angle(const std::array<double, 3>& axis, double angle) {
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (n == 0.0) throw contract_error("Rotation: zero axis");
  const double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return Rotation({{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
                    {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
                    {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}});
}

Rotation Rotation::random(std::uint64_t seed) {
  std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
  // Uniform axis from a normal-free construction, uniform angle would not be
  // Haar; use the subgroup algorithm: random z-rotation conjugated by a
  // random direction works, but composing three axis rotations with
  // arcsin-corrected angles is simpler to get right: draw a uniform
  // quaternion instead.
  const double u1 = uniform01(s), u2 = uniform01(s), u3 = uniform01(s);
  const double pi2 = 2.0 * 3.14159265358979323846;
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double qw = a * std::sin(pi2 * u2), qx = a * std::cos(pi2 * u2);
  const double qy = b * std::sin(pi2 * u3), qz = b * std::cos(pi2 * u3);
  return Rotation({{{1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw)},
                    {2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw)},
                    {2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy)}}});
}

std::array<double, 3> Rotation::apply(const std::array<double, 3>& v) const {
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i)
    out[static_cast<size_t>(i)] = m_[static_cast<size_t>(i)][0] * v[0] + m_[static_cast<size_t>(i)][1] * v[1] + m_[static_cast<size_t>(i)][2] * v[2];
  return out;
}

Rotation Rotation::compose(const Rotation& other) const {
  std::array<std::array<double, 3>, 3> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += at(i, k) * other.at(k, j);
      out[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
    }
  return Rotation(out);
}

WignerD wigner_d(int l, const Rotation& r) {
  const int d = 2 * l + 1;
  if (l == 0) return {0, {1.0}};

  for (int attempt = 0; attempt < 2; ++attempt) {
    const int n = std::max(2 * d, 16);
    const double offset = attempt == 0 ? 0.0 : 0.61803398875;
    // Normal equations for Y(R r_k) = D Y(r_k) over all samples.
    std::vector<double> ata(static_cast<size_t>(d * d), 0.0);
    std::vector<double> atb(static_cast<size_t>(d * d), 0.0);  // nrhs = d, row r holds column of D^T
    for (int k = 0; k < n; ++k) {
      const auto dir = fib_direction(k, n, offset);
      const auto ya = real_spherical_harmonics(l, dir);
      const auto yb = real_spherical_harmonics(l, r.apply(dir));
      const auto& a = ya[static_cast<size_t>(l)];
      const auto& b = yb[static_cast<size_t>(l)];
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) ata[static_cast<size_t>(i * d + j)] += a[static_cast<size_t>(i)] * a[static_cast<size_t>(j)];
        for (int rr = 0; rr < d; ++rr) atb[static_cast<size_t>(rr * d + i)] += a[static_cast<size_t>(i)] * b[static_cast<size_t>(rr)];
      }
    }
    if (!spd_solve(ata, atb, d, d)) continue;  // retry on a second direction set
    WignerD out{l, std::vector<double>(static_cast<size_t>(d * d), 0.0)};
    // atb row rr now holds the rr-th row of D (solution of A x = b_rr).
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.d[static_cast<size_t>(i * d + j)] = atb[static_cast<size_t>(i * d + j)];
    return out;
  }
  throw std::runtime_error("wigner_d: rank-deficient sample system on both direction sets");
}

EquivariantVector rotate(const EquivariantVector& x, const Rotation& r) {
  EquivariantVector out(x.layout);
  std::vector<WignerD> cache;
  const int lmax = x.layout.lmax();
  cache.reserve(static_cast<size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) cache.push_back(wigner_d(l, r));

  for (int e = 0; e < x.layout.num_entries(); ++e) {
    const IrrepsEntry& en = x.layout.entry(e);
    const WignerD& wd = cache[static_cast<size_t>(en.l)];
    const int d = 2 * en.l + 1;
    for (int c = 0; c < en.mul; ++c) {
      const int base = x.layout.index(e, c, -en.l);
      for (int i = 0; i < d; ++i) {
        double v = 0.0;
        for (int j = 0; j < d; ++j) v += wd.d[static_cast<size_t>(i * d + j)] * x.values[static_cast<size_t>(base + j)];
        out.values[static_cast<size_t>(base + i)] = v;
      }
    }
  }
  return out;
}

}  // namespace sphnet
