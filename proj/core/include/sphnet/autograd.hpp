#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sphnet/expansion.hpp"
#include "sphnet/irreps.hpp"
#include "sphnet/sph_linear.hpp"
#include "sphnet/tensor_product.hpp"

namespace sphnet::ad {

// Minimal reverse-mode tape over flat double buffers. Node ids are ints;
// backward closures accumulate into parent grads by id.
class Tape {
 public:
  struct Node {
    std::vector<double> val;
    std::vector<double> grad;
    std::function<void(Tape&, const std::vector<double>&)> back;
  };

  int make(std::vector<double> v, std::function<void(Tape&, const std::vector<double>&)> back = {});
  const std::vector<double>& val(int id) const { return nodes_[static_cast<size_t>(id)].val; }
  std::vector<double>& grad(int id) { return nodes_[static_cast<size_t>(id)].grad; }

  // Reverse sweep from `root` (seeded with `seed`, or ones for a scalar).
  void backward(int root, const std::vector<double>& seed = {});

  size_t size() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
};

// Named parameter storage with Adam moment buffers.
class ParamStore {
 public:
  struct Param {
    std::string name;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<double> m1, m2;  // Adam moments
  };

  int add(const std::string& name, std::vector<double> init);
  Param& at(int id) { return params_[static_cast<size_t>(id)]; }
  const Param& at(int id) const { return params_[static_cast<size_t>(id)]; }
  int count() const { return static_cast<int>(params_.size()); }
  void zero_grad();

 private:
  std::vector<Param> params_;
};

// Binds parameters to tape leaves (one leaf per parameter per tape) and
// harvests leaf gradients back into the store after the reverse sweep.
class Binding {
 public:
  Binding(Tape& tape, ParamStore& store) : tape_(tape), store_(store) {}
  // Differentiable leaf for the parameter.
  int leaf(int param_id);
  // Value-only copy: gradients do not reach the parameter (frozen scores).
  int frozen(int param_id);
  void harvest();

  Tape& tape() { return tape_; }
  ParamStore& store() { return store_; }

 private:
  Tape& tape_;
  ParamStore& store_;
  std::unordered_map<int, int> leaf_of_;
};

// --- elementwise / dense ops -------------------------------------------

int constant(Tape& t, std::vector<double> v);
int add(Tape& t, int a, int b);
int sub(Tape& t, int a, int b);
int ewmul(Tape& t, int a, int b);
int scale(Tape& t, int a, double s);
int sum_many(Tape& t, const std::vector<int>& ids);  // elementwise sum, all same size
int concat(Tape& t, const std::vector<int>& ids);
int slice(Tape& t, int a, int offset, int len);
// out[i] = a[idx[i]].
int gather(Tape& t, int a, std::vector<int> idx);
// Accumulate pieces into a zero vector of length out_len: for each piece
// (node, map), out[map[i]] += node[i]. A node may appear in several pieces.
int scatter_sum(Tape& t, int out_len,
                std::vector<std::pair<int, std::vector<int>>> pieces);
int sigmoid(Tape& t, int a);
// Broadcast multiply: out[i] = a[i] * b[i / group] where a.size = b.size * group.
int group_scale(Tape& t, int a, int b, int group);
// y = W x (+ bias), W row-major (rows x cols).
int linear(Tape& t, int w, int x, int rows, int cols, int bias = -1);
// Scalar node: mean(|a-b|) + mean((a-b)^2).
int mae_mse_loss(Tape& t, int pred, int ref);

// --- equivariant ops -----------------------------------------------------

int op_tp(Tape& t, const TensorProductPlan& plan, int x, int y, int w);
int op_sph_linear(Tape& t, const SphLinearSpec& spec, int w, int b, int x);
int op_expansion(Tape& t, const ExpansionPlan& plan, int f, int w, int b);
// Equivariant normalization: layer norm over channels on l = 0, division by
// the cross-order RMS statistic on l > 0 (epsilon-guarded).
int op_norm(Tape& t, const IrrepsLayout& layout, int x);
// Per-(order >= 1, channel) inner products <x_i, x_j>; output length
// channels * lmax.
int op_inner_per_order(Tape& t, const IrrepsLayout& layout, int xi, int xj);

}  // namespace sphnet::ad
