#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "sphnet/clebsch_gordan.hpp"
#include "sphnet/irreps.hpp"
#include "sphnet/paths.hpp"

namespace sphnet {

// One (l1,l2,l3) coupling inside a plan. Entry indices point into the plan's
// input/output layouts; the normalization factor is 1/sqrt(fan-in) of the
// output entry.
struct PathSpec {
  int in1_entry = 0;
  int in2_entry = 0;
  int out_entry = 0;
  int l1 = 0, l2 = 0, l3 = 0;
  bool has_weight = true;
  double norm = 1.0;
};

// Channel-aligned weighted tensor product: path p couples channel u of
// input1 with channel u of input2 into channel u of the output, with one
// scalar weight per (path, channel). Input2 entries with multiplicity 1 are
// broadcast across channels (used for spherical-harmonic operands).
class TensorProductPlan {
 public:
  TensorProductPlan() = default;

  const IrrepsLayout& in1() const { return in1_; }
  const IrrepsLayout& in2() const { return in2_; }
  const IrrepsLayout& out() const { return out_; }
  const std::vector<PathSpec>& paths() const { return paths_; }
  int channels() const { return channels_; }

  // Number of (weighted path, channel) scalars expected by tp_forward.
  int weight_count() const;
  int weighted_path_count() const;

  // Test hook: scales one CG entry of one path to break equivariance.
  void debug_perturb_cg(int path_index, double factor);

 private:
  friend TensorProductPlan build_plan(const IrrepsLayout&, const IrrepsLayout&,
                                      const IrrepsLayout&, const std::vector<PathTriple>&);
  IrrepsLayout in1_, in2_, out_;
  std::vector<PathSpec> paths_;
  std::vector<std::vector<double>> cg_;  // per path, dense [m1][m2][m3]
  int channels_ = 0;

  friend EquivariantVector tp_forward(const TensorProductPlan&, const EquivariantVector&,
                                      const EquivariantVector&, const std::vector<double>&);
  friend void tp_backward(const TensorProductPlan&, const EquivariantVector&,
                          const EquivariantVector&, const std::vector<double>&,
                          const std::vector<double>&, std::vector<double>&,
                          std::vector<double>&, std::vector<double>&);
};

// Builds a plan containing exactly the selected paths (deterministic order:
// the order of `selected`, which must be duplicate-free). Paths referencing
// an l absent from a layout raise config_error.
TensorProductPlan build_plan(const IrrepsLayout& in1, const IrrepsLayout& in2,
                             const IrrepsLayout& out, const std::vector<PathTriple>& selected);

// out^{l3}_{m3} += norm * w * sum_{m1,m2} C * x^{l1}_{m1} * y^{l2}_{m2}
// per path and channel. Bilinear in (x, y), linear in weights. The weight
// vector is path-major: weights[p * channels + c].
EquivariantVector tp_forward(const TensorProductPlan& plan, const EquivariantVector& x,
                             const EquivariantVector& y, const std::vector<double>& weights);

// Exact adjoints of tp_forward; grad buffers are overwritten.
void tp_backward(const TensorProductPlan& plan, const EquivariantVector& x,
                 const EquivariantVector& y, const std::vector<double>& weights,
                 const std::vector<double>& grad_out, std::vector<double>& grad_x,
                 std::vector<double>& grad_y, std::vector<double>& grad_w);

// Dense multiply-accumulate count: sum over paths of
// (2l1+1)(2l2+1)(2l3+1) * channels.
std::int64_t dense_cost(const TensorProductPlan& plan);
// Same count from a bare path list (no CG tables built); used for orders
// where materializing the plan would be prohibitively large.
std::int64_t dense_cost(const std::vector<PathTriple>& paths, int channels);

}  // namespace sphnet
