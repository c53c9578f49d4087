#include "sphnet/tensor_product.hpp"

#include <cmath>
#include <map>
#include <string>

namespace sphnet {

int TensorProductPlan::weight_count() const { return weighted_path_count() * channels_; }

int TensorProductPlan::weighted_path_count() const {
  int n = 0;
  for (const PathSpec& p : paths_)
    if (p.has_weight) ++n;
  return n;
}

void TensorProductPlan::debug_perturb_cg(int path_index, double factor) {
  auto& block = cg_[static_cast<size_t>(path_index)];
  block[block.size() / 2] *= factor;
  if (block[block.size() / 2] == 0.0) block[block.size() / 2] = factor;
}

TensorProductPlan build_plan(const IrrepsLayout& in1, const IrrepsLayout& in2,
                             const IrrepsLayout& out, const std::vector<PathTriple>& selected) {
  TensorProductPlan plan;
  plan.in1_ = in1;
  plan.in2_ = in2;
  plan.out_ = out;

  // Channel-aligned mode: every entry carries the common channel count,
  // except input2 entries which may broadcast with multiplicity 1.
  int channels = 0;
  for (int e = 0; e < in1.num_entries(); ++e) {
    const int mul = in1.entry(e).mul;
    if (channels == 0) channels = mul;
    if (mul != channels)
      throw config_error("build_plan: input1 multiplicities must agree (channel-aligned mode)");
  }
  for (int e = 0; e < out.num_entries(); ++e)
    if (out.entry(e).mul != channels)
      throw config_error("build_plan: output multiplicities must match input1 channels");
  for (int e = 0; e < in2.num_entries(); ++e) {
    const int mul = in2.entry(e).mul;
    if (mul != channels && mul != 1)
      throw config_error("build_plan: input2 multiplicity must be 1 or the channel count");
  }
  plan.channels_ = channels;

  // Fan-in counts every admissible coupling between the layouts, not just
  // the selected subset, so a sub-plan is numerically identical to the full
  // plan with the dropped paths' weights set to zero.
  std::map<int, int> fan_in;  // output entry -> admissible incoming path count
  for (int e1 = 0; e1 < in1.num_entries(); ++e1)
    for (int e2 = 0; e2 < in2.num_entries(); ++e2)
      for (int e3 = 0; e3 < out.num_entries(); ++e3) {
        const int l1 = in1.entry(e1).l, l2 = in2.entry(e2).l, l3 = out.entry(e3).l;
        if (l3 >= std::abs(l1 - l2) && l3 <= l1 + l2) fan_in[e3] += 1;
      }
  for (const PathTriple& t : selected) {
    PathSpec p;
    p.l1 = t[0];
    p.l2 = t[1];
    p.l3 = t[2];
    if (p.l3 < std::abs(p.l1 - p.l2) || p.l3 > p.l1 + p.l2)
      throw config_error("build_plan: path violates the triangle rule");
    p.in1_entry = in1.find_l(p.l1);
    p.in2_entry = in2.find_l(p.l2);
    p.out_entry = out.find_l(p.l3);
    if (p.in1_entry < 0 || p.in2_entry < 0 || p.out_entry < 0)
      throw config_error("build_plan: path (" + std::to_string(p.l1) + "," + std::to_string(p.l2) +
                         "," + std::to_string(p.l3) + ") references an order absent from a layout");
    plan.paths_.push_back(p);
    plan.cg_.push_back(CGTable::instance().block(p.l1, p.l2, p.l3));
  }
  for (PathSpec& p : plan.paths_) p.norm = 1.0 / std::sqrt(static_cast<double>(fan_in[p.out_entry]));
  return plan;
}

EquivariantVector tp_forward(const TensorProductPlan& plan, const EquivariantVector& x,
                             const EquivariantVector& y, const std::vector<double>& weights) {
  if (x.layout != plan.in1_ || y.layout != plan.in2_)
    throw contract_error("tp_forward: operand layout mismatch");
  if (static_cast<int>(weights.size()) != plan.weight_count())
    throw contract_error("tp_forward: weight count mismatch");

  EquivariantVector out(plan.out_);
  const int C = plan.channels_;
  int wp = 0;
  for (size_t pi = 0; pi < plan.paths_.size(); ++pi) {
    const PathSpec& p = plan.paths_[pi];
    const std::vector<double>& cg = plan.cg_[pi];
    const int d1 = 2 * p.l1 + 1, d2 = 2 * p.l2 + 1, d3 = 2 * p.l3 + 1;
    const bool bcast = plan.in2_.entry(p.in2_entry).mul == 1;
    for (int c = 0; c < C; ++c) {
      const double w = (p.has_weight ? weights[static_cast<size_t>(wp * C + c)] : 1.0) * p.norm;
      const double* xv = &x.values[static_cast<size_t>(x.layout.index(p.in1_entry, c, -p.l1))];
      const double* yv = &y.values[static_cast<size_t>(y.layout.index(p.in2_entry, bcast ? 0 : c, -p.l2))];
      double* ov = &out.values[static_cast<size_t>(out.layout.index(p.out_entry, c, -p.l3))];
      // Fixed summation order (m1 outer, m2 inner) for bit-exact
      // sparse/full consistency.
      for (int i1 = 0; i1 < d1; ++i1) {
        const double xw = xv[i1] * w;
        const double* cg1 = &cg[static_cast<size_t>(i1 * d2 * d3)];
        for (int i2 = 0; i2 < d2; ++i2) {
          const double xy = xw * yv[i2];
          const double* cg2 = &cg1[static_cast<size_t>(i2 * d3)];
          for (int i3 = 0; i3 < d3; ++i3) ov[i3] += cg2[i3] * xy;
        }
      }
    }
    if (p.has_weight) ++wp;
  }
  return out;
}

void tp_backward(const TensorProductPlan& plan, const EquivariantVector& x,
                 const EquivariantVector& y, const std::vector<double>& weights,
                 const std::vector<double>& grad_out, std::vector<double>& grad_x,
                 std::vector<double>& grad_y, std::vector<double>& grad_w) {
  if (static_cast<int>(grad_out.size()) != plan.out_.total_dim())
    throw contract_error("tp_backward: grad_out size mismatch");
  grad_x.assign(static_cast<size_t>(plan.in1_.total_dim()), 0.0);
  grad_y.assign(static_cast<size_t>(plan.in2_.total_dim()), 0.0);
  grad_w.assign(static_cast<size_t>(plan.weight_count()), 0.0);

  const int C = plan.channels_;
  int wp = 0;
  for (size_t pi = 0; pi < plan.paths_.size(); ++pi) {
    const PathSpec& p = plan.paths_[pi];
    const std::vector<double>& cg = plan.cg_[pi];
    const int d1 = 2 * p.l1 + 1, d2 = 2 * p.l2 + 1, d3 = 2 * p.l3 + 1;
    const bool bcast = plan.in2_.entry(p.in2_entry).mul == 1;
    for (int c = 0; c < C; ++c) {
      const double wraw = p.has_weight ? weights[static_cast<size_t>(wp * C + c)] : 1.0;
      const double w = wraw * p.norm;
      const double* xv = &x.values[static_cast<size_t>(x.layout.index(p.in1_entry, c, -p.l1))];
      const double* yv = &y.values[static_cast<size_t>(y.layout.index(p.in2_entry, bcast ? 0 : c, -p.l2))];
      const double* gv = &grad_out[static_cast<size_t>(plan.out_.index(p.out_entry, c, -p.l3))];
      double* gx = &grad_x[static_cast<size_t>(plan.in1_.index(p.in1_entry, c, -p.l1))];
      double* gy = &grad_y[static_cast<size_t>(plan.in2_.index(p.in2_entry, bcast ? 0 : c, -p.l2))];
      double gw = 0.0;
      for (int i1 = 0; i1 < d1; ++i1) {
        const double* cg1 = &cg[static_cast<size_t>(i1 * d2 * d3)];
        double gx1 = 0.0;
        for (int i2 = 0; i2 < d2; ++i2) {
          const double* cg2 = &cg1[static_cast<size_t>(i2 * d3)];
          double s = 0.0;
          for (int i3 = 0; i3 < d3; ++i3) s += cg2[i3] * gv[i3];
          gx1 += s * yv[i2];
          gy[i2] += s * xv[i1] * w;
          gw += s * xv[i1] * yv[i2];
        }
        gx[i1] += gx1 * w;
      }
      if (p.has_weight) grad_w[static_cast<size_t>(wp * C + c)] += gw * p.norm;
    }
    if (p.has_weight) ++wp;
  }
}

std::int64_t dense_cost(const TensorProductPlan& plan) {
  std::int64_t total = 0;
  for (const PathSpec& p : plan.paths()) {
    total += static_cast<std::int64_t>(2 * p.l1 + 1) * (2 * p.l2 + 1) * (2 * p.l3 + 1) *
             plan.channels();
  }
  return total;
}

std::int64_t dense_cost(const std::vector<PathTriple>& paths, int channels) {
  std::int64_t total = 0;
  for (const PathTriple& p : paths)
    total += static_cast<std::int64_t>(2 * p[0] + 1) * (2 * p[1] + 1) * (2 * p[2] + 1) *
             channels;
  return total;
}

}  // namespace sphnet
