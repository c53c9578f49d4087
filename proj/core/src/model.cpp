#include "sphnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphnet/errors.hpp"
#include "sphnet/paths.hpp"
#include "sphnet/scheduler.hpp"
#include "sphnet/spherical_harmonics.hpp"

namespace sphnet {

namespace {

const std::vector<int> kElements = {1, 6, 7, 8};

int element_pos(int z) {
  for (size_t i = 0; i < kElements.size(); ++i)
    if (kElements[i] == z) return static_cast<int>(i);
  throw config_error("model: unsupported element Z=" + std::to_string(z));
}

// Flattened real spherical harmonics in the [(1,0),(1,1),...] layout order.
std::vector<double> sh_values(int lmax, const std::array<double, 3>& dir) {
  const auto ylm = real_spherical_harmonics(lmax, dir);
  std::vector<double> v;
  for (const auto& slice : ylm) v.insert(v.end(), slice.begin(), slice.end());
  return v;
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

// Flat weight indices of the selected paths: [p * channels + c].
std::vector<int> weight_indices(const std::vector<int>& paths, int channels) {
  std::vector<int> idx;
  idx.reserve(paths.size() * static_cast<size_t>(channels));
  for (int p : paths)
    for (int c = 0; c < channels; ++c) idx.push_back(p * channels + c);
  return idx;
}

}  // namespace

void ModelConfig::validate(const BasisSpec& basis_spec) const {
  if (channels <= 0) throw config_error("config: channels must be positive");
  if (lmax < basis_spec.max_l())
    throw config_error("config: lmax must cover the highest orbital order");
  if (rate_tp < 0.0 || rate_tp >= 1.0 || rate_pair < 0.0 || rate_pair >= 1.0)
    throw config_error("config: sparsity rates must lie in [0, 1)");
  if (switch_epoch <= 0) throw config_error("config: switch epoch must be positive");
  if (cutoff <= 0.0) throw config_error("config: cutoff must be positive");
  if (rbf_size <= 0) throw config_error("config: RBF size must be positive");
  if (n_vectorial < 0) throw config_error("config: vectorial block count negative");
}

Model::SphLinearParams Model::make_linear(ad::ParamStore& store, const std::string& name,
                                          const IrrepsLayout& in, const IrrepsLayout& out,
                                          std::uint64_t salt) {
  SphLinearParams p;
  p.spec = SphLinearSpec(in, out);
  // Zero-mean init scaled by 1/sqrt(fan-in); fan-in is the input multiplicity
  // of the matching order, identical for every block in a uniform layout.
  std::vector<double> w;
  w.reserve(static_cast<size_t>(p.spec.weight_count()));
  std::uint64_t ctr = 0;
  for (int e = 0; e < out.num_entries(); ++e) {
    const int in_e = in.find_l(out.entry(e).l);
    const int fan_in = in.entry(in_e).mul;
    const auto blockw = uniform_init(cfg_.seed ^ salt ^ (0x51ULL * (e + 1)),
                                     out.entry(e).mul * fan_in, 1.0 / std::sqrt(fan_in));
    w.insert(w.end(), blockw.begin(), blockw.end());
    ctr += static_cast<std::uint64_t>(blockw.size());
  }
  (void)ctr;
  p.w = store.add(name + ".w", std::move(w));
  p.b = store.add(name + ".b", std::vector<double>(p.spec.bias_count(), 0.0));
  return p;
}

int Model::apply_linear(ad::Binding& b, const SphLinearParams& p, int x) const {
  return ad::op_sph_linear(b.tape(), p.spec, b.leaf(p.w), b.leaf(p.b), x);
}

Model::Model(const ModelConfig& cfg, ad::ParamStore& store) : cfg_(cfg), store_(&store) {
  if (cfg.basis != "toy-svp") throw config_error("model: unknown basis '" + cfg.basis + "'");
  basis_ = BasisSpec::toy_svp();
  cfg_.validate(basis_);
  rbf_ = RbfConfig{cfg_.rbf_size, cfg_.rbf_alpha, cfg_.cutoff};

  const int C = cfg_.channels;
  const int L = cfg_.lmax;
  lvec_ = IrrepsLayout::uniform(C, 1);
  lfull_ = IrrepsLayout::uniform(C, L);
  {
    std::vector<IrrepsEntry> ye;
    for (int l = 0; l <= L; ++l) ye.push_back({1, l});
    ylay_ = IrrepsLayout(std::move(ye));
  }

  universe_ = enumerate_paths(L);
  std::vector<PathTriple> sph1_paths;
  for (const PathTriple& p : universe_)
    if (p[0] <= 1) sph1_paths.push_back(p);
  sph1_plan_ = build_plan(lvec_, ylay_, lfull_, sph1_paths);
  full_plan_ = build_plan(lfull_, ylay_, lfull_, universe_);
  expansion_plan_ = ExpansionPlan(lfull_, basis_.union_layout(), basis_.union_layout());

  const int K = cfg_.rbf_size;
  const int n_elem = static_cast<int>(kElements.size());
  embed_ = store.add("embed.w", uniform_init(cfg_.seed ^ 0xE1ULL, n_elem * C, 1.0));

  for (int v = 0; v < cfg_.n_vectorial; ++v) {
    VectorialParams vp;
    const std::string name = "vec" + std::to_string(v);
    vp.fr = store.add(name + ".fr.w",
                      uniform_init(cfg_.seed ^ (0xF0ULL + static_cast<std::uint64_t>(v)),
                                   3 * C * K, 1.0 / std::sqrt(static_cast<double>(K))));
    vp.fm = make_linear(store, name + ".fm", lvec_, lvec_, 0xA0ULL + static_cast<std::uint64_t>(v));
    vec_.push_back(vp);
  }

  sph1_fr_ = store.add("sph1.fr.w",
                       uniform_init(cfg_.seed ^ 0xB1ULL, sph1_plan_.weight_count() * K,
                                    1.0 / std::sqrt(static_cast<double>(K))));
  sph1_post_ = make_linear(store, "sph1.post", lfull_, lfull_, 0xB2ULL);
  sph2_post_ = make_linear(store, "sph2.post", lfull_, lfull_, 0xB3ULL);

  diag_lin1_ = make_linear(store, "diag.lin1", lfull_, lfull_, 0xC1ULL);
  diag_lin2_ = make_linear(store, "diag.lin2", lfull_, lfull_, 0xC2ULL);
  diag_tpw_ = store.add("diag.tpw",
                        uniform_init(cfg_.seed ^ 0xC3ULL,
                                     static_cast<int>(universe_.size()) * C, 1.0));
  diag_post_ = make_linear(store, "diag.post", lfull_, lfull_, 0xC4ULL);

  const int pair_wc = static_cast<int>(universe_.size()) * C;
  block1_fr_ = store.add("block1.fr.w",
                         uniform_init(cfg_.seed ^ 0xD1ULL, pair_wc * K,
                                      1.0 / std::sqrt(static_cast<double>(K))));
  block1_post_ = make_linear(store, "block1.post", lfull_, lfull_, 0xD2ULL);
  block2_post_ = make_linear(store, "block2.post", lfull_, lfull_, 0xD3ULL);

  const int ewc = expansion_plan_.weight_count();
  type_embed_ = store.add("type_embed.w", uniform_init(cfg_.seed ^ 0xE2ULL, n_elem * C, 1.0));
  // The expansion filters start small so the prediction grows from near zero.
  // Useful upstream contributions then have to scale up during training, which
  // pushes their gate scores above the untouched unit init instead of below
  // it; with an order-one start the amplitude correction runs downward and
  // top-k selection inverts (it keeps the paths that never contributed).
  filter_diag_w_ = store.add("filter.diag.w",
                             uniform_init(cfg_.seed ^ 0xE3ULL, ewc * C, 0.1 / std::sqrt(C)));
  filter_off_w_ = store.add("filter.off.w",
                            uniform_init(cfg_.seed ^ 0xE4ULL, ewc * 2 * C,
                                         0.1 / std::sqrt(2.0 * C)));
  bias_diag_ = store.add("bias.diag", std::vector<double>(expansion_plan_.bias_count(), 0.0));
  bias_off_ = store.add("bias.off", std::vector<double>(expansion_plan_.bias_count(), 0.0));

  const int t = cfg_.switch_epoch;
  diag_gate_ = SparseTPGate(universe_, cfg_.rate_tp, t, cfg_.seed ^ 0x71ULL, store, "gate.diag");
  nondiag_gate_ =
      SparseTPGate(universe_, cfg_.rate_tp, t, cfg_.seed ^ 0x72ULL, store, "gate.nondiag");
  sph_pair_gate_ = SparsePairGate(lfull_, full_plan_.weight_count(), rbf_, cfg_.rate_pair, t,
                                  cfg_.seed ^ 0x73ULL, store, "gate.pair.sph");
  block_pair_gate_ = SparsePairGate(lfull_, pair_wc, rbf_, cfg_.rate_pair, t,
                                    cfg_.seed ^ 0x74ULL, store, "gate.pair.block");
}

std::shared_ptr<const TensorProductPlan> Model::gated_plan(
    const std::vector<int>& selection) const {
  for (size_t i = 0; i < plan_cache_keys_.size(); ++i)
    if (plan_cache_keys_[i] == selection) return plan_cache_[i];
  std::vector<PathTriple> paths;
  for (int p : selection) paths.push_back(universe_[static_cast<size_t>(p)]);
  auto plan = std::make_shared<TensorProductPlan>(build_plan(lfull_, lfull_, lfull_, paths));
  if (plan_cache_.size() >= 64) {
    plan_cache_.clear();
    plan_cache_keys_.clear();
  }
  plan_cache_.push_back(plan);
  plan_cache_keys_.push_back(selection);
  return plan;
}

ForwardOutput Model::forward(ad::Binding& b, const MoleculeGraph& mol, int epoch, bool ungated) {
  ad::Tape& t = b.tape();
  const int C = cfg_.channels;
  const int n = mol.natoms();
  for (int z : mol.atomic_numbers()) element_pos(z);  // validate early

  ForwardOutput out;

  // --- embedding: l = 0 features from the element table -------------------
  const int zeros_l1 = ad::constant(t, std::vector<double>(3 * static_cast<size_t>(C), 0.0));
  std::vector<int> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int e0 = ad::slice(t, b.leaf(embed_), element_pos(mol.z(i)) * C, C);
    x[static_cast<size_t>(i)] = ad::concat(t, {e0, zeros_l1});
  }

  // Per-pair RBF constants are shared across blocks.
  auto rbf_node = [&](double r) { return ad::constant(t, rbf(rbf_, r)); };

  // --- vectorial blocks (orders <= 1) --------------------------------------
  std::vector<double> tile(3 * static_cast<size_t>(C), 0.0);
  for (const VectorialParams& vp : vec_) {
    std::vector<int> next(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<int> msgs;
      for (int j : mol.neighbors(i)) {
        const int w = ad::linear(t, b.leaf(vp.fr), rbf_node(mol.distance(i, j)), 3 * C,
                                 cfg_.rbf_size);
        const int w0 = ad::slice(t, w, 0, C);
        const int w1 = ad::slice(t, w, C, C);
        const int w2 = ad::slice(t, w, 2 * C, C);
        const int xj0 = ad::slice(t, x[static_cast<size_t>(j)], 0, C);
        const int xj1 = ad::slice(t, x[static_cast<size_t>(j)], C, 3 * C);
        // Order-1 components live in the real spherical-harmonic order
        // (m = -1, 0, 1) = (y, z, x), so the injected direction must too.
        const auto dir = mol.direction(i, j);
        const std::array<double, 3> dyzx = {dir[1], dir[2], dir[0]};
        for (int c = 0; c < C; ++c)
          for (int a = 0; a < 3; ++a) tile[static_cast<size_t>(c * 3 + a)] = dyzx[static_cast<size_t>(a)];
        const int rhat = ad::constant(t, tile);
        const int m0 = ad::ewmul(t, w0, xj0);
        const int m1 = ad::add(t, ad::group_scale(t, xj1, w1, 3),
                               ad::group_scale(t, rhat, ad::ewmul(t, w2, xj0), 3));
        msgs.push_back(ad::concat(t, {m0, m1}));
      }
      int s = x[static_cast<size_t>(i)];
      if (!msgs.empty()) s = ad::add(t, s, ad::sum_many(t, msgs));
      next[static_cast<size_t>(i)] = apply_linear(b, vp.fm, s);
    }
    x = next;
  }

  // --- spherical block 1: raise to full order ------------------------------
  const int pad = ad::constant(
      t, std::vector<double>(static_cast<size_t>(lfull_.total_dim() - lvec_.total_dim()), 0.0));
  {
    std::vector<int> next(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<int> msgs;
      for (int j : mol.neighbors(i)) {
        const int y = ad::constant(t, sh_values(cfg_.lmax, mol.direction(i, j)));
        const int w = ad::linear(t, b.leaf(sph1_fr_), rbf_node(mol.distance(i, j)),
                                 sph1_plan_.weight_count(), cfg_.rbf_size);
        msgs.push_back(ad::op_tp(t, sph1_plan_, x[static_cast<size_t>(j)], y, w));
      }
      int s = ad::concat(t, {x[static_cast<size_t>(i)], pad});
      if (!msgs.empty()) s = ad::add(t, s, ad::sum_many(t, msgs));
      next[static_cast<size_t>(i)] = apply_linear(b, sph1_post_, ad::op_norm(t, lfull_, s));
    }
    x = next;
  }

  // --- spherical block 2: gated pair refinement ----------------------------
  {
    const auto& pairs = mol.neighbor_pairs();
    out.spherical_pair_selection =
        ungated ? all_indices(static_cast<int>(pairs.size()))
                : sph_pair_gate_.select_pairs(b, epoch, mol, x);
    std::vector<std::vector<int>> msgs(static_cast<size_t>(n));
    for (int p : out.spherical_pair_selection) {
      const auto& [i, j] = pairs[static_cast<size_t>(p)];
      const double r = mol.distance(i, j);
      // Message into i from j, and into j from i.
      for (const auto& [dst, src] : {std::pair{i, j}, std::pair{j, i}}) {
        const int desc = sph_pair_gate_.descriptor(b, x[static_cast<size_t>(dst)],
                                                   x[static_cast<size_t>(src)]);
        const int w = sph_pair_gate_.pair_weights(b, epoch, r, desc);
        const int y = ad::constant(t, sh_values(cfg_.lmax, mol.direction(dst, src)));
        msgs[static_cast<size_t>(dst)].push_back(
            ad::op_tp(t, full_plan_, x[static_cast<size_t>(src)], y, w));
      }
    }
    std::vector<int> next(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      int s = x[static_cast<size_t>(i)];
      if (!msgs[static_cast<size_t>(i)].empty())
        s = ad::add(t, s, ad::sum_many(t, msgs[static_cast<size_t>(i)]));
      next[static_cast<size_t>(i)] = apply_linear(b, sph2_post_, ad::op_norm(t, lfull_, s));
    }
    x = next;
  }

  // --- diagonal pair construction ------------------------------------------
  std::vector<int> f_diag(static_cast<size_t>(n));
  {
    std::vector<int> path_sel;
    int score_node = -1;
    if (ungated) {
      path_sel = all_indices(static_cast<int>(universe_.size()));
    } else {
      auto sel = diag_gate_.select(b, epoch);
      path_sel = sel.indices;
      score_node = sel.score_node;
    }
    out.diag_path_selection = path_sel;
    auto plan = gated_plan(path_sel);
    out.plans.push_back(plan);
    const int w_sel = ad::gather(t, b.leaf(diag_tpw_), weight_indices(path_sel, C));
    const int w_eff = ungated ? w_sel : ad::group_scale(t, w_sel, score_node, C);
    for (int i = 0; i < n; ++i) {
      const int x1 = apply_linear(b, diag_lin1_, x[static_cast<size_t>(i)]);
      const int x2 = apply_linear(b, diag_lin2_, x[static_cast<size_t>(i)]);
      const int f = ad::op_tp(t, *plan, x1, x2, w_eff);
      f_diag[static_cast<size_t>(i)] = apply_linear(b, diag_post_, ad::op_norm(t, lfull_, f));
    }
  }

  // --- non-diagonal pair construction --------------------------------------
  // Block 1: ungated, all pairs within the global-connect radius (coverage).
  std::vector<std::pair<int, int>> block1_pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (cfg_.global_connect_radius <= 0.0 ||
          mol.distance(i, j) < cfg_.global_connect_radius)
        block1_pairs.emplace_back(i, j);

  auto full_pair_plan = gated_plan(all_indices(static_cast<int>(universe_.size())));
  out.plans.push_back(full_pair_plan);

  // Directed pair features, keyed by i * n + j. Both directions are built so
  // that the (i, j) orbital block can be symmetrized against the transposed
  // (j, i) block, which keeps the prediction covariant under atom relabeling.
  std::vector<int> f_pair(static_cast<size_t>(n) * n, -1);
  for (const auto& [i, j] : block1_pairs) {
    const int w = ad::linear(t, b.leaf(block1_fr_), rbf_node(mol.distance(i, j)),
                             full_pair_plan->weight_count(), cfg_.rbf_size);
    for (const auto& [a, bb] : {std::pair{i, j}, std::pair{j, i}}) {
      const int f = ad::op_tp(t, *full_pair_plan, x[static_cast<size_t>(a)],
                              x[static_cast<size_t>(bb)], w);
      f_pair[static_cast<size_t>(a * n + bb)] =
          apply_linear(b, block1_post_, ad::op_norm(t, lfull_, f));
    }
  }

  // Block 2: gated paths and gated pairs, added on top of block 1.
  {
    const auto& pairs = mol.neighbor_pairs();
    std::vector<int> path_sel;
    int score_node = -1;
    if (ungated) {
      path_sel = all_indices(static_cast<int>(universe_.size()));
    } else {
      auto sel = nondiag_gate_.select(b, epoch);
      path_sel = sel.indices;
      score_node = sel.score_node;
    }
    out.nondiag_path_selection = path_sel;
    out.nondiag_pair_selection = ungated ? all_indices(static_cast<int>(pairs.size()))
                                         : block_pair_gate_.select_pairs(b, epoch, mol, x);
    auto plan = gated_plan(path_sel);
    out.plans.push_back(plan);
    const auto w_idx = weight_indices(path_sel, C);
    for (int p : out.nondiag_pair_selection) {
      const auto& [i, j] = pairs[static_cast<size_t>(p)];
      for (const auto& [a, bb] : {std::pair{i, j}, std::pair{j, i}}) {
        const int desc = block_pair_gate_.descriptor(b, x[static_cast<size_t>(a)],
                                                     x[static_cast<size_t>(bb)]);
        const int w_full = block_pair_gate_.pair_weights(b, epoch, mol.distance(a, bb), desc);
        const int w_sel = ad::gather(t, w_full, w_idx);
        const int w_eff = ungated ? w_sel : ad::group_scale(t, w_sel, score_node, C);
        const int f = ad::op_tp(t, *plan, x[static_cast<size_t>(a)],
                                x[static_cast<size_t>(bb)], w_eff);
        const int f2 = apply_linear(b, block2_post_, ad::op_norm(t, lfull_, f));
        int& slot = f_pair[static_cast<size_t>(a * n + bb)];
        slot = slot < 0 ? f2 : ad::add(t, slot, f2);
      }
    }
  }

  // --- expansion into orbital blocks and symmetric assembly ----------------
  const std::vector<int> offsets = basis_.atom_offsets(mol);
  const int dim = basis_.total_dim(mol);
  const int udim = basis_.union_layout().total_dim();
  const int ewc = expansion_plan_.weight_count();
  std::vector<std::pair<int, std::vector<int>>> pieces;

  auto type_vec = [&](int i) {
    return ad::slice(t, b.leaf(type_embed_), element_pos(mol.z(i)) * C, C);
  };

  for (int i = 0; i < n; ++i) {
    const int filt = ad::linear(t, b.leaf(filter_diag_w_), type_vec(i), ewc, C);
    const int M = ad::op_expansion(t, expansion_plan_, f_diag[static_cast<size_t>(i)], filt,
                                   b.leaf(bias_diag_));
    const auto& ext = basis_.extraction(mol.z(i));
    const int d = static_cast<int>(ext.size());
    std::vector<int> pick, perm;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        pick.push_back(ext[static_cast<size_t>(r)] * udim + ext[static_cast<size_t>(c)]);
        perm.push_back(c * d + r);
      }
    const int h_raw = ad::gather(t, M, pick);
    // (h + h^T) / 2: exactly symmetric.
    const int h = ad::scale(t, ad::add(t, h_raw, ad::gather(t, h_raw, perm)), 0.5);
    std::vector<int> map;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        map.push_back((offsets[static_cast<size_t>(i)] + r) * dim +
                      offsets[static_cast<size_t>(i)] + c);
    pieces.emplace_back(h, std::move(map));
  }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int f_ij = f_pair[static_cast<size_t>(i * n + j)];
      const int f_ji = f_pair[static_cast<size_t>(j * n + i)];
      if (f_ij < 0 || f_ji < 0) continue;
      const int filt_ij = ad::linear(t, b.leaf(filter_off_w_),
                                     ad::concat(t, {type_vec(i), type_vec(j)}), ewc, 2 * C);
      const int filt_ji = ad::linear(t, b.leaf(filter_off_w_),
                                     ad::concat(t, {type_vec(j), type_vec(i)}), ewc, 2 * C);
      const int M_ij = ad::op_expansion(t, expansion_plan_, f_ij, filt_ij, b.leaf(bias_off_));
      const int M_ji = ad::op_expansion(t, expansion_plan_, f_ji, filt_ji, b.leaf(bias_off_));
      const auto& ext_i = basis_.extraction(mol.z(i));
      const auto& ext_j = basis_.extraction(mol.z(j));
      const int di = static_cast<int>(ext_i.size());
      const int dj = static_cast<int>(ext_j.size());
      // (i, j) block averaged with the transposed (j, i) block.
      std::vector<int> pick, pick_t;
      for (int r = 0; r < di; ++r)
        for (int c = 0; c < dj; ++c) {
          pick.push_back(ext_i[static_cast<size_t>(r)] * udim + ext_j[static_cast<size_t>(c)]);
          pick_t.push_back(ext_j[static_cast<size_t>(c)] * udim + ext_i[static_cast<size_t>(r)]);
        }
      const int h = ad::scale(
          t, ad::add(t, ad::gather(t, M_ij, pick), ad::gather(t, M_ji, pick_t)), 0.5);
      std::vector<int> map_ij, map_ji;
      for (int r = 0; r < di; ++r)
        for (int c = 0; c < dj; ++c) {
          map_ij.push_back((offsets[static_cast<size_t>(i)] + r) * dim +
                           offsets[static_cast<size_t>(j)] + c);
          map_ji.push_back((offsets[static_cast<size_t>(j)] + c) * dim +
                           offsets[static_cast<size_t>(i)] + r);
        }
      pieces.emplace_back(h, std::move(map_ij));
      pieces.emplace_back(h, std::move(map_ji));
    }

  out.h_node = ad::scatter_sum(t, dim * dim, std::move(pieces));
  out.dim = dim;
  return out;
}

std::vector<double> Model::predict(ad::ParamStore& store, const MoleculeGraph& mol, int epoch,
                                   bool ungated) {
  ad::Tape tape;
  ad::Binding b(tape, store);
  const ForwardOutput o = forward(b, mol, epoch, ungated);
  return tape.val(o.h_node);
}

void Model::freeze_gates() {
  diag_gate_.freeze();
  nondiag_gate_.freeze();
  sph_pair_gate_.freeze();
  block_pair_gate_.freeze();
}

}  // namespace sphnet
