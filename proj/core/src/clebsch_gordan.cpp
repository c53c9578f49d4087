#include "sphnet/clebsch_gordan.hpp"

#include <cmath>
#include <stdexcept>

namespace sphnet {

namespace {

double log_factorial(int n) {
  static std::vector<double> table = [] {
    std::vector<double> t(1, 0.0);
    for (int i = 1; i <= 128; ++i) t.push_back(t.back() + std::log(static_cast<double>(i)));
    return t;
  }();
  return table[static_cast<size_t>(n)];
}

bool triangle_ok(int l1, int l2, int l3) {
  return l3 >= std::abs(l1 - l2) && l3 <= l1 + l2;
}

}  // namespace

double complex_cg(int l1, int m1, int l2, int m2, int l3, int m3) {
  if (!triangle_ok(l1, l2, l3)) return 0.0;
  if (m1 + m2 != m3) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(m3) > l3) return 0.0;

  // Racah's closed form.
  const double log_pref =
      0.5 * (log_factorial(l3 + l1 - l2) + log_factorial(l3 - l1 + l2) +
             log_factorial(l1 + l2 - l3) - log_factorial(l1 + l2 + l3 + 1) +
             log_factorial(l3 + m3) + log_factorial(l3 - m3) + log_factorial(l1 - m1) +
             log_factorial(l1 + m1) + log_factorial(l2 - m2) + log_factorial(l2 + m2)) +
      0.5 * std::log(2.0 * l3 + 1.0);

  const int k_min = std::max({0, l2 - l3 - m1, l1 - l3 + m2});
  const int k_max = std::min({l1 + l2 - l3, l1 - m1, l2 + m2});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_term = log_factorial(k) + log_factorial(l1 + l2 - l3 - k) +
                            log_factorial(l1 - m1 - k) + log_factorial(l2 + m2 - k) +
                            log_factorial(l3 - l2 + m1 + k) + log_factorial(l3 - l1 - m2 + k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum += sign * std::exp(log_pref - log_term);
  }
  return sum;
}

std::vector<std::complex<double>> complex_to_real_sh_transform(int l) {
  if (l < 0) throw std::domain_error("complex_to_real_sh_transform: l must be non-negative");
  const int d = 2 * l + 1;
  std::vector<std::complex<double>> u(static_cast<size_t>(d * d), {0.0, 0.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto idx = [d, l](int mr, int mc) { return static_cast<size_t>((l + mr) * d + (l + mc)); };
  u[idx(0, 0)] = 1.0;
  for (int m = 1; m <= l; ++m) {
    const double cs = (m % 2 == 0) ? 1.0 : -1.0;
    // Y_{l,m} = (Y^l_{-m} + (-1)^m Y^l_m) / sqrt(2)
    u[idx(m, -m)] = inv_sqrt2;
    u[idx(m, m)] = cs * inv_sqrt2;
    // Y_{l,-m} = i (Y^l_{-m} - (-1)^m Y^l_m) / sqrt(2)
    u[idx(-m, -m)] = std::complex<double>(0.0, inv_sqrt2);
    u[idx(-m, m)] = std::complex<double>(0.0, -cs * inv_sqrt2);
  }
  return u;
}

std::vector<double> clebsch_gordan(int l1, int l2, int l3) {
  if (!triangle_ok(l1, l2, l3))
    throw std::domain_error("clebsch_gordan: triangle rule violated");
  const int d1 = 2 * l1 + 1, d2 = 2 * l2 + 1, d3 = 2 * l3 + 1;

  const auto u1 = complex_to_real_sh_transform(l1);
  const auto u2 = complex_to_real_sh_transform(l2);
  const auto u3 = complex_to_real_sh_transform(l3);

  // C_real[M1,M2,M3] = sum conj(U1[M1,m1]) conj(U2[M2,m2]) U3[M3,m3] C(m)
  // Stage the contraction to keep it O(d^4) instead of O(d^6).
  std::vector<std::complex<double>> stage1(static_cast<size_t>(d1 * d2 * d3), {0.0, 0.0});
  for (int m1 = -l1; m1 <= l1; ++m1)
    for (int m2 = -l2; m2 <= l2; ++m2) {
      const int m3 = m1 + m2;
      if (std::abs(m3) > l3) continue;
      const double c = complex_cg(l1, m1, l2, m2, l3, m3);
      if (c == 0.0) continue;
      for (int mm3 = -l3; mm3 <= l3; ++mm3) {
        const auto u = u3[static_cast<size_t>((l3 + mm3) * d3 + (l3 + m3))];
        if (u == std::complex<double>(0.0, 0.0)) continue;
        stage1[static_cast<size_t>(((l1 + m1) * d2 + (l2 + m2)) * d3 + (l3 + mm3))] += u * c;
      }
    }
  std::vector<std::complex<double>> stage2(static_cast<size_t>(d1 * d2 * d3), {0.0, 0.0});
  for (int mm2 = -l2; mm2 <= l2; ++mm2)
    for (int m2 = -l2; m2 <= l2; ++m2) {
      const auto u = std::conj(u2[static_cast<size_t>((l2 + mm2) * d2 + (l2 + m2))]);
      if (u == std::complex<double>(0.0, 0.0)) continue;
      for (int m1 = 0; m1 < d1; ++m1)
        for (int m3 = 0; m3 < d3; ++m3)
          stage2[static_cast<size_t>((m1 * d2 + (l2 + mm2)) * d3 + m3)] +=
              u * stage1[static_cast<size_t>((m1 * d2 + (l2 + m2)) * d3 + m3)];
    }
  std::vector<std::complex<double>> full(static_cast<size_t>(d1 * d2 * d3), {0.0, 0.0});
  for (int mm1 = -l1; mm1 <= l1; ++mm1)
    for (int m1 = -l1; m1 <= l1; ++m1) {
      const auto u = std::conj(u1[static_cast<size_t>((l1 + mm1) * d1 + (l1 + m1))]);
      if (u == std::complex<double>(0.0, 0.0)) continue;
      for (int m2 = 0; m2 < d2; ++m2)
        for (int m3 = 0; m3 < d3; ++m3)
          full[static_cast<size_t>(((l1 + mm1) * d2 + m2) * d3 + m3)] +=
              u * stage2[static_cast<size_t>(((l1 + m1) * d2 + m2) * d3 + m3)];
    }

  // With these conventions the block is purely real when l1+l2+l3 is even
  // and purely imaginary when odd; rotate the phase accordingly, then verify
  // the residual imaginary part.
  double max_re = 0.0, max_im = 0.0;
  for (const auto& z : full) {
    max_re = std::max(max_re, std::abs(z.real()));
    max_im = std::max(max_im, std::abs(z.imag()));
  }
  std::vector<double> out(static_cast<size_t>(d1 * d2 * d3), 0.0);
  const bool take_imag = max_im > max_re;
  double resid = 0.0;
  for (size_t i = 0; i < full.size(); ++i) {
    out[i] = take_imag ? full[i].imag() : full[i].real();
    resid = std::max(resid, take_imag ? std::abs(full[i].real()) : std::abs(full[i].imag()));
  }
  if (resid > 1e-12)
    throw std::runtime_error("clebsch_gordan: residual imaginary part exceeds 1e-12");

  // Deterministic sign: first nonzero entry positive.
  for (const double v : out) {
    if (std::abs(v) > 1e-10) {
      if (v < 0.0)
        for (double& w : out) w = -w;
      break;
    }
  }
  return out;
}

const std::vector<double>& CGTable::block(int l1, int l2, int l3) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_tuple(l1, l2, l3);
  auto it = blocks_.find(key);
  if (it == blocks_.end()) it = blocks_.emplace(key, clebsch_gordan(l1, l2, l3)).first;
  return it->second;
}

CGTable& CGTable::instance() {
  static CGTable table;
  return table;
}

}  // namespace sphnet
