#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sphnet/autograd.hpp"
#include "sphnet/molecule.hpp"
#include "sphnet/paths.hpp"
#include "sphnet/rbf.hpp"
#include "sphnet/scheduler.hpp"

namespace sphnet {

// Path-level gate over a fixed coupling universe. Holds a learnable score
// per path; selection follows the three-phase scheduler, and the selected
// paths' tensor-product outputs are multiplied by their scores. During the
// fixed phase the scores enter as constants (zero gradient).
class SparseTPGate {
 public:
  SparseTPGate() = default;
  SparseTPGate(std::vector<PathTriple> universe, double rate, int switch_epoch,
               std::uint64_t seed, ad::ParamStore& store, const std::string& name);

  struct Selection {
    std::vector<int> indices;        // into the universe, ascending
    std::vector<PathTriple> paths;   // the selected couplings
    int score_node = -1;             // tape node, one score per selected path
  };

  Selection select(ad::Binding& b, int epoch);
  // Snapshot the selection from current scores (end of the adaptive epoch).
  void freeze();

  const std::vector<PathTriple>& universe() const { return universe_; }
  SparsityScheduler& scheduler() { return sched_; }
  const SparsityScheduler& scheduler() const { return sched_; }
  int score_param() const { return score_param_; }
  // Current raw score values (for gate-weight dumps).
  std::vector<double> scores(const ad::ParamStore& store) const;

 private:
  std::vector<PathTriple> universe_;
  SparsityScheduler sched_;
  int score_param_ = -1;
  ad::ParamStore* store_ = nullptr;
};

// Edge-level gate. Scores each candidate pair through a one-layer network
// on rotation-invariant pair descriptors, selects per molecule with the
// three-phase scheduler, and produces the per-pair tensor-product weight
// vector w_ij = F_r(RBF(r_ij)) * F_s(score * descriptor). F_r and F_s carry
// no bias so that w_ij vanishes identically beyond the cutoff. At the end
// of the adaptive epoch the scoring network is copied; the copy drives the
// fixed phase, keeping selection deterministic on unseen molecules.
class SparsePairGate {
 public:
  SparsePairGate() = default;
  // `layout` is the node feature layout; descriptors have length
  // 2 * channels + channels * lmax. `weight_out` is the downstream plan's
  // weight count (weighted paths x channels).
  SparsePairGate(const IrrepsLayout& layout, int weight_out, RbfConfig rbf, double rate,
                 int switch_epoch, std::uint64_t seed, ad::ParamStore& store,
                 const std::string& name);

  // Descriptor I_ij = x_i(l=0) || x_j(l=0) || <x_i, x_j> per (order>=1,
  // channel). Rotation invariant.
  int descriptor(ad::Binding& b, int xi, int xj) const;
  int descriptor_dim() const { return desc_dim_; }

  // Pair score in (0, 1); uses the frozen network copy when frozen=true.
  int score(ad::Binding& b, int desc, bool frozen_scores) const;

  // Selection over the molecule's candidate pairs; returns indices into
  // mol.neighbor_pairs(), ascending. `node_features` holds one tape id per
  // atom. Fewer than 2 atoms yields an empty selection.
  std::vector<int> select_pairs(ad::Binding& b, int epoch, const MoleculeGraph& mol,
                                const std::vector<int>& node_features);

  // Per-pair weight vector (length weight_out) for one selected pair.
  int pair_weights(ad::Binding& b, int epoch, double r, int desc) const;

  SparsityPhase phase(int epoch) const;
  // Copy the scoring network into the frozen slot (end of adaptive epoch).
  void freeze();
  bool has_frozen() const { return frozen_valid_; }

  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }
  void mark_frozen() { frozen_valid_ = true; }  // checkpoint restore
  int fp_param() const { return fp_w_; }
  int fp_frozen_param() const { return fp_w_frozen_; }

 private:
  const IrrepsLayout* layout_ = nullptr;
  int desc_dim_ = 0;
  int weight_out_ = 0;
  RbfConfig rbf_{};
  double rate_ = 0.0;
  int switch_epoch_ = 1;
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  bool frozen_valid_ = false;
  ad::ParamStore* store_ = nullptr;
  int fp_w_ = -1, fp_b_ = -1;              // scoring network
  int fp_w_frozen_ = -1, fp_b_frozen_ = -1;  // frozen copy
  int fr_w_ = -1;  // RBF branch, weight_out x K, bias-free
  int fs_w_ = -1;  // descriptor branch, weight_out x desc_dim, bias-free
};

}  // namespace sphnet
