#include "sphnet/sph_linear.hpp"

namespace sphnet {

SphLinearSpec::SphLinearSpec(IrrepsLayout input, IrrepsLayout output)
    : in(std::move(input)), out(std::move(output)) {
  for (int e = 0; e < out.num_entries(); ++e)
    if (in.find_l(out.entry(e).l) < 0)
      throw config_error("sph_linear: output order missing from the input layout");
}

int SphLinearSpec::weight_count() const {
  int n = 0;
  for (int e = 0; e < out.num_entries(); ++e) {
    const int ie = in.find_l(out.entry(e).l);
    n += out.entry(e).mul * in.entry(ie).mul;
  }
  return n;
}

int SphLinearSpec::bias_count() const {
  int n = 0;
  for (int e = 0; e < out.num_entries(); ++e)
    if (out.entry(e).l == 0) n += out.entry(e).mul;
  return n;
}

std::vector<double> SphLinearSpec::identity_weights() const {
  std::vector<double> w(static_cast<size_t>(weight_count()), 0.0);
  size_t off = 0;
  for (int e = 0; e < out.num_entries(); ++e) {
    const int ie = in.find_l(out.entry(e).l);
    const int om = out.entry(e).mul, im = in.entry(ie).mul;
    if (om != im) throw config_error("sph_linear: identity weights need square blocks");
    for (int i = 0; i < om; ++i) w[off + static_cast<size_t>(i * im + i)] = 1.0;
    off += static_cast<size_t>(om * im);
  }
  return w;
}

EquivariantVector sph_linear(const SphLinearSpec& spec, const std::vector<double>& weights,
                             const std::vector<double>& bias, const EquivariantVector& x) {
  if (x.layout != spec.in) throw contract_error("sph_linear: input layout mismatch");
  if (static_cast<int>(weights.size()) != spec.weight_count())
    throw contract_error("sph_linear: weight count mismatch");
  if (static_cast<int>(bias.size()) != spec.bias_count())
    throw contract_error("sph_linear: bias count mismatch");

  EquivariantVector y(spec.out);
  size_t woff = 0, boff = 0;
  for (int e = 0; e < spec.out.num_entries(); ++e) {
    const int l = spec.out.entry(e).l;
    const int ie = spec.in.find_l(l);
    const int om = spec.out.entry(e).mul, im = spec.in.entry(ie).mul;
    const int d = 2 * l + 1;
    for (int co = 0; co < om; ++co) {
      double* yv = &y.values[static_cast<size_t>(y.layout.index(e, co, -l))];
      for (int ci = 0; ci < im; ++ci) {
        const double w = weights[woff + static_cast<size_t>(co * im + ci)];
        const double* xv = &x.values[static_cast<size_t>(x.layout.index(ie, ci, -l))];
        for (int m = 0; m < d; ++m) yv[m] += w * xv[m];
      }
      if (l == 0) yv[0] += bias[boff + static_cast<size_t>(co)];
    }
    woff += static_cast<size_t>(om * im);
    if (l == 0) boff += static_cast<size_t>(om);
  }
  return y;
}

void sph_linear_backward(const SphLinearSpec& spec, const std::vector<double>& weights,
                         const EquivariantVector& x, const std::vector<double>& grad_out,
                         std::vector<double>& grad_w, std::vector<double>& grad_b,
                         std::vector<double>& grad_x) {
  grad_w.assign(static_cast<size_t>(spec.weight_count()), 0.0);
  grad_b.assign(static_cast<size_t>(spec.bias_count()), 0.0);
  grad_x.assign(static_cast<size_t>(spec.in.total_dim()), 0.0);

  size_t woff = 0, boff = 0;
  for (int e = 0; e < spec.out.num_entries(); ++e) {
    const int l = spec.out.entry(e).l;
    const int ie = spec.in.find_l(l);
    const int om = spec.out.entry(e).mul, im = spec.in.entry(ie).mul;
    const int d = 2 * l + 1;
    for (int co = 0; co < om; ++co) {
      const double* gv = &grad_out[static_cast<size_t>(spec.out.index(e, co, -l))];
      for (int ci = 0; ci < im; ++ci) {
        const size_t wi = woff + static_cast<size_t>(co * im + ci);
        const double* xv = &x.values[static_cast<size_t>(x.layout.index(ie, ci, -l))];
        double* gx = &grad_x[static_cast<size_t>(x.layout.index(ie, ci, -l))];
        for (int m = 0; m < d; ++m) {
          grad_w[wi] += gv[m] * xv[m];
          gx[m] += gv[m] * weights[wi];
        }
      }
      if (l == 0) grad_b[boff + static_cast<size_t>(co)] += gv[0];
    }
    woff += static_cast<size_t>(om * im);
    if (l == 0) boff += static_cast<size_t>(om);
  }
}

}  // namespace sphnet
