#include "sphnet/autograd.hpp"

#include <cmath>

namespace sphnet::ad {

int Tape::make(std::vector<double> v, std::function<void(Tape&, const std::vector<double>&)> back) {
  Node n;
  n.val = std::move(v);
  n.grad.assign(n.val.size(), 0.0);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::backward(int root, const std::vector<double>& seed) {
  auto& rg = nodes_[static_cast<size_t>(root)].grad;
  if (seed.empty()) {
    for (double& g : rg) g = 1.0;
  } else {
    rg = seed;
  }
  for (int id = root; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.back) n.back(*this, n.grad);
  }
}

int ParamStore::add(const std::string& name, std::vector<double> init) {
  Param p;
  p.name = name;
  p.value = std::move(init);
  p.grad.assign(p.value.size(), 0.0);
  p.m1.assign(p.value.size(), 0.0);
  p.m2.assign(p.value.size(), 0.0);
  params_.push_back(std::move(p));
  return static_cast<int>(params_.size()) - 1;
}

void ParamStore::zero_grad() {
  for (Param& p : params_)
    for (double& g : p.grad) g = 0.0;
}

int Binding::leaf(int param_id) {
  auto it = leaf_of_.find(param_id);
  if (it != leaf_of_.end()) return it->second;
  const int id = tape_.make(store_.at(param_id).value);
  leaf_of_.emplace(param_id, id);
  return id;
}

int Binding::frozen(int param_id) { return tape_.make(store_.at(param_id).value); }

void Binding::harvest() {
  for (const auto& [pid, nid] : leaf_of_) {
    auto& pg = store_.at(pid).grad;
    const auto& ng = tape_.grad(nid);
    for (size_t i = 0; i < pg.size(); ++i) pg[i] += ng[i];
  }
}

int constant(Tape& t, std::vector<double> v) { return t.make(std::move(v)); }

int add(Tape& t, int a, int b) {
  std::vector<double> v = t.val(a);
  const auto& bv = t.val(b);
  for (size_t i = 0; i < v.size(); ++i) v[i] += bv[i];
  return t.make(std::move(v), [a, b](Tape& tp, const std::vector<double>& g) {
    auto& ga = tp.grad(a);
    auto& gb = tp.grad(b);
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] += g[i];
    }
  });
}

int sub(Tape& t, int a, int b) {
  std::vector<double> v = t.val(a);
  const auto& bv = t.val(b);
  for (size_t i = 0; i < v.size(); ++i) v[i] -= bv[i];
  return t.make(std::move(v), [a, b](Tape& tp, const std::vector<double>& g) {
    auto& ga = tp.grad(a);
    auto& gb = tp.grad(b);
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i];
      gb[i] -= g[i];
    }
  });
}

int ewmul(Tape& t, int a, int b) {
  std::vector<double> v = t.val(a);
  const auto& bv = t.val(b);
  for (size_t i = 0; i < v.size(); ++i) v[i] *= bv[i];
  return t.make(std::move(v), [a, b](Tape& tp, const std::vector<double>& g) {
    const auto& av = tp.val(a);
    const auto& bv2 = tp.val(b);
    auto& ga = tp.grad(a);
    auto& gb = tp.grad(b);
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * bv2[i];
      gb[i] += g[i] * av[i];
    }
  });
}

int scale(Tape& t, int a, double s) {
  std::vector<double> v = t.val(a);
  for (double& x : v) x *= s;
  return t.make(std::move(v), [a, s](Tape& tp, const std::vector<double>& g) {
    auto& ga = tp.grad(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * s;
  });
}

int sum_many(Tape& t, const std::vector<int>& ids) {
  std::vector<double> v = t.val(ids.front());
  for (size_t k = 1; k < ids.size(); ++k) {
    const auto& av = t.val(ids[k]);
    for (size_t i = 0; i < v.size(); ++i) v[i] += av[i];
  }
  return t.make(std::move(v), [ids](Tape& tp, const std::vector<double>& g) {
    for (int id : ids) {
      auto& ga = tp.grad(id);
      for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
  });
}

int concat(Tape& t, const std::vector<int>& ids) {
  std::vector<double> v;
  for (int id : ids) {
    const auto& av = t.val(id);
    v.insert(v.end(), av.begin(), av.end());
  }
  return t.make(std::move(v), [ids](Tape& tp, const std::vector<double>& g) {
    size_t off = 0;
    for (int id : ids) {
      auto& ga = tp.grad(id);
      for (size_t i = 0; i < ga.size(); ++i) ga[i] += g[off + i];
      off += ga.size();
    }
  });
}

int slice(Tape& t, int a, int offset, int len) {
  const auto& av = t.val(a);
  std::vector<double> v(av.begin() + offset, av.begin() + offset + len);
  return t.make(std::move(v), [a, offset](Tape& tp, const std::vector<double>& g) {
    auto& ga = tp.grad(a);
    for (size_t i = 0; i < g.size(); ++i) ga[static_cast<size_t>(offset) + i] += g[i];
  });
}

int gather(Tape& t, int a, std::vector<int> idx) {
  const auto& av = t.val(a);
  std::vector<double> v(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) v[i] = av[static_cast<size_t>(idx[i])];
  return t.make(std::move(v), [a, idx = std::move(idx)](Tape& tp, const std::vector<double>& g) {
    auto& ga = tp.grad(a);
    for (size_t i = 0; i < idx.size(); ++i) ga[static_cast<size_t>(idx[i])] += g[i];
  });
}

int scatter_sum(Tape& t, int out_len,
                std::vector<std::pair<int, std::vector<int>>> pieces) {
  std::vector<double> v(static_cast<size_t>(out_len), 0.0);
  for (const auto& [id, map] : pieces) {
    const auto& av = t.val(id);
    for (size_t i = 0; i < map.size(); ++i) v[static_cast<size_t>(map[i])] += av[i];
  }
  return t.make(std::move(v), [pieces = std::move(pieces)](Tape& tp, const std::vector<double>& g) {
    for (const auto& [id, map] : pieces) {
      auto& ga = tp.grad(id);
      for (size_t i = 0; i < map.size(); ++i) ga[i] += g[static_cast<size_t>(map[i])];
    }
  });
}

int sigmoid(Tape& t, int a) {
  std::vector<double> v = t.val(a);
  for (double& x : v) x = 1.0 / (1.0 + std::exp(-x));
  std::vector<double> s = v;
  return t.make(std::move(v), [a, s = std::move(s)](Tape& tp, const std::vector<double>& g) {
    auto& ga = tp.grad(a);
    for (size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * s[i] * (1.0 - s[i]);
  });
}

int group_scale(Tape& t, int a, int b, int group) {
  std::vector<double> v = t.val(a);
  const auto& bv = t.val(b);
  for (size_t i = 0; i < v.size(); ++i) v[i] *= bv[i / static_cast<size_t>(group)];
  return t.make(std::move(v), [a, b, group](Tape& tp, const std::vector<double>& g) {
    const auto& av = tp.val(a);
    const auto& bv2 = tp.val(b);
    auto& ga = tp.grad(a);
    auto& gb = tp.grad(b);
    for (size_t i = 0; i < g.size(); ++i) {
      ga[i] += g[i] * bv2[i / static_cast<size_t>(group)];
      gb[i / static_cast<size_t>(group)] += g[i] * av[i];
    }
  });
}

int linear(Tape& t, int w, int x, int rows, int cols, int bias) {
  const auto& wv = t.val(w);
  const auto& xv = t.val(x);
  std::vector<double> v(static_cast<size_t>(rows), 0.0);
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < cols; ++c) s += wv[static_cast<size_t>(r * cols + c)] * xv[static_cast<size_t>(c)];
    v[static_cast<size_t>(r)] = s;
  }
  if (bias >= 0) {
    const auto& bv = t.val(bias);
    for (int r = 0; r < rows; ++r) v[static_cast<size_t>(r)] += bv[static_cast<size_t>(r)];
  }
  return t.make(std::move(v), [w, x, rows, cols, bias](Tape& tp, const std::vector<double>& g) {
    const auto& wv2 = tp.val(w);
    const auto& xv2 = tp.val(x);
    auto& gw = tp.grad(w);
    auto& gx = tp.grad(x);
    for (int r = 0; r < rows; ++r) {
      const double gr = g[static_cast<size_t>(r)];
      for (int c = 0; c < cols; ++c) {
        gw[static_cast<size_t>(r * cols + c)] += gr * xv2[static_cast<size_t>(c)];
        gx[static_cast<size_t>(c)] += gr * wv2[static_cast<size_t>(r * cols + c)];
      }
    }
    if (bias >= 0) {
      auto& gb = tp.grad(bias);
      for (int r = 0; r < rows; ++r) gb[static_cast<size_t>(r)] += g[static_cast<size_t>(r)];
    }
  });
}

int mae_mse_loss(Tape& t, int pred, int ref) {
  const auto& pv = t.val(pred);
  const auto& rv = t.val(ref);
  const double n = static_cast<double>(pv.size());
  double mae = 0.0, mse = 0.0;
  for (size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - rv[i];
    mae += std::abs(d);
    mse += d * d;
  }
  return t.make({mae / n + mse / n}, [pred, ref, n](Tape& tp, const std::vector<double>& g) {
    const auto& pv2 = tp.val(pred);
    const auto& rv2 = tp.val(ref);
    auto& gp = tp.grad(pred);
    auto& gr = tp.grad(ref);
    for (size_t i = 0; i < pv2.size(); ++i) {
      const double d = pv2[i] - rv2[i];
      const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      const double gi = g[0] * (sgn + 2.0 * d) / n;
      gp[i] += gi;
      gr[i] -= gi;
    }
  });
}

int op_tp(Tape& t, const TensorProductPlan& plan, int x, int y, int w) {
  EquivariantVector xv(plan.in1(), t.val(x));
  EquivariantVector yv(plan.in2(), t.val(y));
  EquivariantVector out = tp_forward(plan, xv, yv, t.val(w));
  return t.make(std::move(out.values), [&plan, x, y, w](Tape& tp, const std::vector<double>& g) {
    EquivariantVector xv2(plan.in1(), tp.val(x));
    EquivariantVector yv2(plan.in2(), tp.val(y));
    std::vector<double> gx, gy, gw;
    tp_backward(plan, xv2, yv2, tp.val(w), g, gx, gy, gw);
    auto& ax = tp.grad(x);
    auto& ay = tp.grad(y);
    auto& aw = tp.grad(w);
    for (size_t i = 0; i < ax.size(); ++i) ax[i] += gx[i];
    for (size_t i = 0; i < ay.size(); ++i) ay[i] += gy[i];
    for (size_t i = 0; i < aw.size(); ++i) aw[i] += gw[i];
  });
}

int op_sph_linear(Tape& t, const SphLinearSpec& spec, int w, int b, int x) {
  EquivariantVector xv(spec.in, t.val(x));
  EquivariantVector out = sph_linear(spec, t.val(w), t.val(b), xv);
  return t.make(std::move(out.values), [&spec, w, b, x](Tape& tp, const std::vector<double>& g) {
    EquivariantVector xv2(spec.in, tp.val(x));
    std::vector<double> gw, gb, gx;
    sph_linear_backward(spec, tp.val(w), xv2, g, gw, gb, gx);
    auto& aw = tp.grad(w);
    auto& ab = tp.grad(b);
    auto& ax = tp.grad(x);
    for (size_t i = 0; i < aw.size(); ++i) aw[i] += gw[i];
    for (size_t i = 0; i < ab.size(); ++i) ab[i] += gb[i];
    for (size_t i = 0; i < ax.size(); ++i) ax[i] += gx[i];
  });
}

int op_expansion(Tape& t, const ExpansionPlan& plan, int f, int w, int b) {
  EquivariantVector fv(plan.input(), t.val(f));
  std::vector<double> m = tensor_expansion(plan, fv, t.val(w), t.val(b));
  return t.make(std::move(m), [&plan, f, w, b](Tape& tp, const std::vector<double>& g) {
    EquivariantVector fv2(plan.input(), tp.val(f));
    std::vector<double> gf, gw, gb;
    tensor_expansion_backward(plan, fv2, tp.val(w), g, gf, gw, gb);
    auto& af = tp.grad(f);
    auto& aw = tp.grad(w);
    auto& ab = tp.grad(b);
    for (size_t i = 0; i < af.size(); ++i) af[i] += gf[i];
    for (size_t i = 0; i < aw.size(); ++i) aw[i] += gw[i];
    for (size_t i = 0; i < ab.size(); ++i) ab[i] += gb[i];
  });
}

namespace {
constexpr double kNormEps = 1e-6;
}

int op_norm(Tape& t, const IrrepsLayout& layout, int x) {
  const auto& xv = t.val(x);
  std::vector<double> v(xv.size(), 0.0);

  // l = 0: layer normalization over channels, per entry.
  // l > 0: divide by the shared RMS statistic across all l > 0 slices.
  int lmax = layout.lmax();
  double rms_acc = 0.0;
  for (int e = 0; e < layout.num_entries(); ++e) {
    const IrrepsEntry& en = layout.entry(e);
    if (en.l == 0) continue;
    const int d = 2 * en.l + 1;
    double mean_sq = 0.0;
    for (int c = 0; c < en.mul; ++c)
      for (int m = 0; m < d; ++m) {
        const double val = xv[static_cast<size_t>(layout.index(e, c, m - en.l))];
        mean_sq += val * val;
      }
    rms_acc += mean_sq / (static_cast<double>(d) * en.mul);
  }
  const double r = std::sqrt(rms_acc / std::max(1, lmax) + kNormEps);

  // l=0 stats per entry
  std::vector<double> mu, sd;
  for (int e = 0; e < layout.num_entries(); ++e) {
    const IrrepsEntry& en = layout.entry(e);
    if (en.l != 0) {
      const int d = 2 * en.l + 1;
      for (int c = 0; c < en.mul; ++c)
        for (int m = 0; m < d; ++m) {
          const size_t i = static_cast<size_t>(layout.index(e, c, m - en.l));
          v[i] = xv[i] / r;
        }
      continue;
    }
    double m0 = 0.0;
    for (int c = 0; c < en.mul; ++c) m0 += xv[static_cast<size_t>(layout.index(e, c, 0))];
    m0 /= en.mul;
    double var = 0.0;
    for (int c = 0; c < en.mul; ++c) {
      const double d0 = xv[static_cast<size_t>(layout.index(e, c, 0))] - m0;
      var += d0 * d0;
    }
    var /= en.mul;
    const double s = std::sqrt(var + kNormEps);
    mu.push_back(m0);
    sd.push_back(s);
    for (int c = 0; c < en.mul; ++c) {
      const size_t i = static_cast<size_t>(layout.index(e, c, 0));
      v[i] = (xv[i] - m0) / s;
    }
  }

  return t.make(std::move(v), [&layout, x, r, mu, sd](Tape& tp, const std::vector<double>& g) {
    const auto& xv2 = tp.val(x);
    auto& gx = tp.grad(x);
    const int lmax2 = std::max(1, layout.lmax());

    // l > 0 part: y = x / r with r = sqrt(sum_e w_e * x_e^2 + eps),
    // w_e = 1/(lmax * (2l+1) * mul) for each l>0 element.
    double gdotx = 0.0;
    for (int e = 0; e < layout.num_entries(); ++e) {
      const IrrepsEntry& en = layout.entry(e);
      if (en.l == 0) continue;
      const int d = 2 * en.l + 1;
      for (int c = 0; c < en.mul; ++c)
        for (int m = 0; m < d; ++m) {
          const size_t i = static_cast<size_t>(layout.index(e, c, m - en.l));
          gdotx += g[i] * xv2[i];
        }
    }
    int l0_idx = 0;
    for (int e = 0; e < layout.num_entries(); ++e) {
      const IrrepsEntry& en = layout.entry(e);
      if (en.l != 0) {
        const int d = 2 * en.l + 1;
        const double w_e = 1.0 / (static_cast<double>(lmax2) * d * en.mul);
        for (int c = 0; c < en.mul; ++c)
          for (int m = 0; m < d; ++m) {
            const size_t i = static_cast<size_t>(layout.index(e, c, m - en.l));
            gx[i] += g[i] / r - gdotx * w_e * xv2[i] / (r * r * r);
          }
        continue;
      }
      // layer norm backward (no affine parameters)
      const double m0 = mu[static_cast<size_t>(l0_idx)];
      const double s = sd[static_cast<size_t>(l0_idx)];
      ++l0_idx;
      const int n = en.mul;
      double gsum = 0.0, gysum = 0.0;
      for (int c = 0; c < n; ++c) {
        const size_t i = static_cast<size_t>(layout.index(e, c, 0));
        const double yh = (xv2[i] - m0) / s;
        gsum += g[i];
        gysum += g[i] * yh;
      }
      for (int c = 0; c < n; ++c) {
        const size_t i = static_cast<size_t>(layout.index(e, c, 0));
        const double yh = (xv2[i] - m0) / s;
        gx[i] += (g[i] - gsum / n - yh * gysum / n) / s;
      }
    }
  });
}

int op_inner_per_order(Tape& t, const IrrepsLayout& layout, int xi, int xj) {
  const auto& a = t.val(xi);
  const auto& b = t.val(xj);
  std::vector<double> v;
  for (int e = 0; e < layout.num_entries(); ++e) {
    const IrrepsEntry& en = layout.entry(e);
    if (en.l == 0) continue;
    const int d = 2 * en.l + 1;
    for (int c = 0; c < en.mul; ++c) {
      double s = 0.0;
      const int base = layout.index(e, c, -en.l);
      for (int m = 0; m < d; ++m)
        s += a[static_cast<size_t>(base + m)] * b[static_cast<size_t>(base + m)];
      v.push_back(s);
    }
  }
  return t.make(std::move(v), [&layout, xi, xj](Tape& tp, const std::vector<double>& g) {
    const auto& a2 = tp.val(xi);
    const auto& b2 = tp.val(xj);
    auto& ga = tp.grad(xi);
    auto& gb = tp.grad(xj);
    size_t k = 0;
    for (int e = 0; e < layout.num_entries(); ++e) {
      const IrrepsEntry& en = layout.entry(e);
      if (en.l == 0) continue;
      const int d = 2 * en.l + 1;
      for (int c = 0; c < en.mul; ++c, ++k) {
        const int base = layout.index(e, c, -en.l);
        for (int m = 0; m < d; ++m) {
          ga[static_cast<size_t>(base + m)] += g[k] * b2[static_cast<size_t>(base + m)];
          gb[static_cast<size_t>(base + m)] += g[k] * a2[static_cast<size_t>(base + m)];
        }
      }
    }
  });
}

}  // namespace sphnet::ad
