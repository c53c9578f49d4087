#include "sphnet/gates.hpp"

#include <cmath>

#include "sphnet/errors.hpp"

namespace sphnet {

SparseTPGate::SparseTPGate(std::vector<PathTriple> universe, double rate, int switch_epoch,
                           std::uint64_t seed, ad::ParamStore& store, const std::string& name)
    : universe_(std::move(universe)),
      sched_(static_cast<int>(universe_.size()), rate, switch_epoch, seed),
      store_(&store) {
  score_param_ = store.add(name + ".score", std::vector<double>(universe_.size(), 1.0));
}

SparseTPGate::Selection SparseTPGate::select(ad::Binding& b, int epoch) {
  Selection sel;
  const auto& scores = store_->at(score_param_).value;
  sel.indices = sched_.select(epoch, scores);
  for (int i : sel.indices) sel.paths.push_back(universe_[static_cast<size_t>(i)]);
  const bool fixed = sched_.phase(epoch) == SparsityPhase::fixed;
  const int score_vec = fixed ? b.frozen(score_param_) : b.leaf(score_param_);
  sel.score_node = ad::gather(b.tape(), score_vec, sel.indices);
  return sel;
}

void SparseTPGate::freeze() { sched_.freeze(store_->at(score_param_).value); }

std::vector<double> SparseTPGate::scores(const ad::ParamStore& store) const {
  return store.at(score_param_).value;
}

SparsePairGate::SparsePairGate(const IrrepsLayout& layout, int weight_out, RbfConfig rbf,
                               double rate, int switch_epoch, std::uint64_t seed,
                               ad::ParamStore& store, const std::string& name)
    : layout_(&layout),
      weight_out_(weight_out),
      rbf_(rbf),
      rate_(rate),
      switch_epoch_(switch_epoch),
      seed_(seed),
      store_(&store) {
  if (rate < 0.0 || rate >= 1.0) throw config_error("pair gate: rate must lie in [0, 1)");
  if (switch_epoch <= 0) throw config_error("pair gate: switch epoch must be positive");
  int channels = 0, lmax = layout.lmax();
  for (int e = 0; e < layout.num_entries(); ++e)
    if (layout.entry(e).l == 0) channels += layout.entry(e).mul;
  int inner = 0;
  for (int e = 0; e < layout.num_entries(); ++e)
    if (layout.entry(e).l > 0) inner += layout.entry(e).mul;
  desc_dim_ = 2 * channels + inner;
  (void)lmax;

  const int K = rbf_.basis_size;
  fp_w_ = store.add(name + ".fp.w",
                    uniform_init(seed ^ 0x1111ULL, desc_dim_, 1.0 / std::sqrt(desc_dim_)));
  fp_b_ = store.add(name + ".fp.b", std::vector<double>(1, 0.0));
  fp_w_frozen_ = store.add(name + ".fp_frozen.w", std::vector<double>(desc_dim_, 0.0));
  fp_b_frozen_ = store.add(name + ".fp_frozen.b", std::vector<double>(1, 0.0));
  fr_w_ = store.add(name + ".fr.w", uniform_init(seed ^ 0x2222ULL, weight_out * K,
                                                 1.0 / std::sqrt(static_cast<double>(K))));
  fs_w_ = store.add(name + ".fs.w", uniform_init(seed ^ 0x3333ULL, weight_out * desc_dim_,
                                                 1.0 / std::sqrt(desc_dim_)));
}

int SparsePairGate::descriptor(ad::Binding& b, int xi, int xj) const {
  ad::Tape& t = b.tape();
  // l = 0 slices of both nodes.
  std::vector<int> l0_idx;
  for (int e = 0; e < layout_->num_entries(); ++e) {
    const IrrepsEntry& en = layout_->entry(e);
    if (en.l != 0) continue;
    for (int c = 0; c < en.mul; ++c) l0_idx.push_back(layout_->index(e, c, 0));
  }
  const int si = ad::gather(t, xi, l0_idx);
  const int sj = ad::gather(t, xj, l0_idx);
  const int inner = ad::op_inner_per_order(t, *layout_, xi, xj);
  return ad::concat(t, {si, sj, inner});
}

int SparsePairGate::score(ad::Binding& b, int desc, bool frozen_scores) const {
  ad::Tape& t = b.tape();
  const int w = frozen_scores ? b.frozen(fp_w_frozen_) : b.leaf(fp_w_);
  const int bias = frozen_scores ? b.frozen(fp_b_frozen_) : b.leaf(fp_b_);
  return ad::sigmoid(t, ad::linear(t, w, desc, 1, desc_dim_, bias));
}

SparsityPhase SparsePairGate::phase(int epoch) const {
  if (epoch < switch_epoch_) return SparsityPhase::random_select;
  if (epoch == switch_epoch_) return SparsityPhase::adaptive;
  return SparsityPhase::fixed;
}

namespace {

// Raw (tape-free) score of one pair descriptor.
double raw_score(const std::vector<double>& w, double bias, const std::vector<double>& desc) {
  double s = bias;
  for (size_t i = 0; i < desc.size(); ++i) s += w[i] * desc[i];
  return 1.0 / (1.0 + std::exp(-s));
}

std::vector<double> raw_descriptor(const IrrepsLayout& layout, const std::vector<double>& a,
                                   const std::vector<double>& b) {
  std::vector<double> d;
  for (const std::vector<double>* x : {&a, &b})
    for (int e = 0; e < layout.num_entries(); ++e) {
      const IrrepsEntry& en = layout.entry(e);
      if (en.l != 0) continue;
      for (int c = 0; c < en.mul; ++c)
        d.push_back((*x)[static_cast<size_t>(layout.index(e, c, 0))]);
    }
  for (int e = 0; e < layout.num_entries(); ++e) {
    const IrrepsEntry& en = layout.entry(e);
    if (en.l == 0) continue;
    for (int c = 0; c < en.mul; ++c) {
      double s = 0.0;
      const int base = layout.index(e, c, -en.l);
      for (int m = 0; m < 2 * en.l + 1; ++m)
        s += a[static_cast<size_t>(base + m)] * b[static_cast<size_t>(base + m)];
      d.push_back(s);
    }
  }
  return d;
}

}  // namespace

std::vector<int> SparsePairGate::select_pairs(ad::Binding& b, int epoch,
                                              const MoleculeGraph& mol,
                                              const std::vector<int>& node_features) {
  const auto& pairs = mol.neighbor_pairs();
  if (mol.natoms() < 2 || pairs.empty()) return {};
  const int n = static_cast<int>(pairs.size());

  switch (phase(epoch)) {
    case SparsityPhase::random_select: {
      std::vector<int> keep;
      for (int p = 0; p < n; ++p) {
        const std::uint64_t h = splitmix64(seed_ ^ (counter_ + static_cast<std::uint64_t>(p)));
        if (hash_to_unit(h) < 1.0 - rate_) keep.push_back(p);
      }
      counter_ += static_cast<std::uint64_t>(n);
      return keep;
    }
    case SparsityPhase::adaptive:
    case SparsityPhase::fixed: {
      const bool fixed = phase(epoch) == SparsityPhase::fixed;
      if (fixed && !frozen_valid_)
        throw contract_error("pair gate: fixed phase reached without frozen scores");
      const auto& w = store_->at(fixed ? fp_w_frozen_ : fp_w_).value;
      const double bias = store_->at(fixed ? fp_b_frozen_ : fp_b_).value[0];
      std::vector<double> scores(static_cast<size_t>(n));
      for (int p = 0; p < n; ++p) {
        const auto& [i, j] = pairs[static_cast<size_t>(p)];
        const auto d = raw_descriptor(*layout_, b.tape().val(node_features[static_cast<size_t>(i)]),
                                      b.tape().val(node_features[static_cast<size_t>(j)]));
        scores[static_cast<size_t>(p)] = raw_score(w, bias, d);
      }
      const int count = static_cast<int>(std::ceil((1.0 - rate_) * n));
      return top_indices(scores, count);
    }
  }
  throw contract_error("pair gate: unreachable phase");
}

int SparsePairGate::pair_weights(ad::Binding& b, int epoch, double r, int desc) const {
  ad::Tape& t = b.tape();
  const bool fixed = phase(epoch) == SparsityPhase::fixed;
  const int sc = score(b, desc, fixed);
  const int gated_desc = ad::group_scale(t, desc, sc, desc_dim_);
  const int fr = ad::linear(t, b.leaf(fr_w_), ad::constant(t, rbf(rbf_, r)), weight_out_,
                            rbf_.basis_size);
  const int fs = ad::linear(t, b.leaf(fs_w_), gated_desc, weight_out_, desc_dim_);
  return ad::ewmul(t, fr, fs);
}

void SparsePairGate::freeze() {
  store_->at(fp_w_frozen_).value = store_->at(fp_w_).value;
  store_->at(fp_b_frozen_).value = store_->at(fp_b_).value;
  frozen_valid_ = true;
}

}  // namespace sphnet
