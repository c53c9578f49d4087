#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sphnet/autograd.hpp"
#include "sphnet/expansion.hpp"
#include "sphnet/gates.hpp"
#include "sphnet/molecule.hpp"
#include "sphnet/rbf.hpp"
#include "sphnet/sph_linear.hpp"
#include "sphnet/tensor_product.hpp"

namespace sphnet {

struct ModelConfig {
  int lmax = 4;
  int channels = 8;
  int n_vectorial = 4;
  double rate_tp = 0.0;    // sparsity rate k for path gates
  double rate_pair = 0.0;  // sparsity rate k for pair gates
  int switch_epoch = 3;    // scheduler epoch t
  int rbf_size = 16;       // K
  double rbf_alpha = 0.8;  // 1/Angstrom
  double cutoff = 5.0;     // Angstrom, message passing radius
  // Radius of the first (ungated) pair-construction block; nonpositive
  // means fully connected.
  double global_connect_radius = 0.0;
  std::string basis = "toy-svp";
  std::uint64_t seed = 1;

  void validate(const BasisSpec& basis_spec) const;
};

// One forward pass worth of tape state. The plans vector owns the
// selection-dependent tensor-product plans referenced by tape closures, so
// this object must outlive any backward() through the same tape.
struct ForwardOutput {
  int h_node = -1;  // tape node holding the assembled n x n matrix, row-major
  int dim = 0;
  std::vector<std::shared_ptr<const TensorProductPlan>> plans;
  // Gate selections used in this pass (for inspection and tests).
  std::vector<int> diag_path_selection;
  std::vector<int> nondiag_path_selection;
  std::vector<int> spherical_pair_selection;  // into mol.neighbor_pairs()
  std::vector<int> nondiag_pair_selection;    // into the block-2 pair list
};

// Full architecture: embedding, vectorial blocks (orders <= 1), two
// spherical blocks (order raise, then gated refinement), diagonal and
// non-diagonal pair construction, tensor expansion into a symmetric
// block matrix over the orbital basis.
class Model {
 public:
  Model(const ModelConfig& cfg, ad::ParamStore& store);

  // Builds the prediction on the binding's tape. `ungated` bypasses every
  // gate: all pairs, all paths, no score multipliers (reference forward).
  ForwardOutput forward(ad::Binding& b, const MoleculeGraph& mol, int epoch,
                        bool ungated = false);

  // Convenience: plain-value prediction (fresh tape, no gradients).
  std::vector<double> predict(ad::ParamStore& store, const MoleculeGraph& mol, int epoch,
                              bool ungated = false);

  // Snapshot all gate selections (end of the adaptive epoch).
  void freeze_gates();

  const ModelConfig& config() const { return cfg_; }
  const BasisSpec& basis() const { return basis_; }
  RbfConfig rbf_config() const { return rbf_; }
  const IrrepsLayout& feature_layout() const { return lfull_; }

  SparseTPGate& diag_gate() { return diag_gate_; }
  SparseTPGate& nondiag_gate() { return nondiag_gate_; }
  SparsePairGate& spherical_pair_gate() { return sph_pair_gate_; }
  SparsePairGate& nondiag_pair_gate() { return block_pair_gate_; }
  const std::vector<PathTriple>& path_universe() const { return universe_; }

 private:
  struct SphLinearParams {
    SphLinearSpec spec;
    int w = -1, b = -1;
  };
  struct VectorialParams {
    int fr = -1;  // (3C x K), bias-free
    SphLinearParams fm;
  };

  SphLinearParams make_linear(ad::ParamStore& store, const std::string& name,
                              const IrrepsLayout& in, const IrrepsLayout& out,
                              std::uint64_t salt);
  int apply_linear(ad::Binding& b, const SphLinearParams& p, int x) const;

  // Shared plan for a path selection over (lfull x ylay -> lfull).
  std::shared_ptr<const TensorProductPlan> gated_plan(const std::vector<int>& selection) const;

  ModelConfig cfg_;
  BasisSpec basis_;
  RbfConfig rbf_{};
  IrrepsLayout lvec_, lfull_, ylay_;
  std::vector<int> element_index_;  // supported Z, in embedding order

  TensorProductPlan sph1_plan_;  // orders <=1 times Y -> full
  TensorProductPlan full_plan_;  // full x Y -> full (spherical block 2)
  std::vector<PathTriple> universe_;  // enumerate_paths(lmax)
  ExpansionPlan expansion_plan_;

  // Parameters (ids into the shared store).
  int embed_ = -1;
  std::vector<VectorialParams> vec_;
  int sph1_fr_ = -1;
  SphLinearParams sph1_post_;
  SphLinearParams sph2_post_;
  SphLinearParams diag_lin1_, diag_lin2_, diag_post_;
  int diag_tpw_ = -1;  // per (universe path, channel) weights
  int block1_fr_ = -1;
  SphLinearParams block1_post_;
  SphLinearParams block2_post_;
  int type_embed_ = -1;
  int filter_diag_w_ = -1, filter_off_w_ = -1;
  int bias_diag_ = -1, bias_off_ = -1;

  SparseTPGate diag_gate_, nondiag_gate_;
  SparsePairGate sph_pair_gate_, block_pair_gate_;

  ad::ParamStore* store_ = nullptr;

  mutable std::vector<std::shared_ptr<const TensorProductPlan>> plan_cache_;
  mutable std::vector<std::vector<int>> plan_cache_keys_;
};

}  // namespace sphnet
