// Command-line surface: dataset generation, training, equivariance checks,
// scaling benchmarks and gate inspection.
//
// Exit codes: 0 success, 1 runtime error, 2 non-finite numerics, 3 bad file
// or config format.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sphnet/checkpoint.hpp"
#include "sphnet/dataset.hpp"
#include "sphnet/errors.hpp"
#include "sphnet/io.hpp"
#include "sphnet/metrics.hpp"
#include "sphnet/model.hpp"
#include "sphnet/rotation.hpp"
#include "sphnet/scheduler.hpp"
#include "sphnet/tensor_product.hpp"
#include "sphnet/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sphnet;

namespace {

// ---------- run configuration ------------------------------------------------

struct RunConfig {
  ModelConfig model;
  int n_molecules = 200;
  int min_atoms = 3;
  int max_atoms = 12;
  TrainConfig train;
  double eval_fraction = 0.2;
};

void reject_unknown(const json& j, const std::vector<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw format_error("config: unknown key '" + key + "' in " + where);
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw format_error(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"model", "data", "train"}, "top level");

  RunConfig rc;
  if (j.contains("model")) {
    const json& m = j["model"];
    reject_unknown(m,
                   {"lmax", "channels", "n_vectorial", "rate_tp", "rate_pair", "switch_epoch",
                    "rbf_size", "rbf_alpha", "cutoff", "global_connect_radius", "basis", "seed"},
                   "model");
    ModelConfig& c = rc.model;
    c.lmax = m.value("lmax", c.lmax);
    c.channels = m.value("channels", c.channels);
    c.n_vectorial = m.value("n_vectorial", c.n_vectorial);
    c.rate_tp = m.value("rate_tp", c.rate_tp);
    c.rate_pair = m.value("rate_pair", c.rate_pair);
    c.switch_epoch = m.value("switch_epoch", c.switch_epoch);
    c.rbf_size = m.value("rbf_size", c.rbf_size);
    c.rbf_alpha = m.value("rbf_alpha", c.rbf_alpha);
    c.cutoff = m.value("cutoff", c.cutoff);
    c.global_connect_radius = m.value("global_connect_radius", c.global_connect_radius);
    c.basis = m.value("basis", c.basis);
    c.seed = m.value("seed", c.seed);
  }
  if (j.contains("data")) {
    const json& d = j["data"];
    reject_unknown(d, {"n_molecules", "min_atoms", "max_atoms"}, "data");
    rc.n_molecules = d.value("n_molecules", rc.n_molecules);
    rc.min_atoms = d.value("min_atoms", rc.min_atoms);
    rc.max_atoms = d.value("max_atoms", rc.max_atoms);
  }
  if (j.contains("train")) {
    const json& t = j["train"];
    reject_unknown(t, {"epochs", "lr", "warmup_steps", "eval_fraction"}, "train");
    rc.train.epochs = t.value("epochs", rc.train.epochs);
    rc.train.lr = t.value("lr", rc.train.lr);
    rc.train.warmup_steps = t.value("warmup_steps", rc.train.warmup_steps);
    rc.eval_fraction = t.value("eval_fraction", rc.eval_fraction);
  }
  return rc;
}

json echo_config(const RunConfig& rc) {
  return json{{"model",
               {{"lmax", rc.model.lmax},
                {"channels", rc.model.channels},
                {"n_vectorial", rc.model.n_vectorial},
                {"rate_tp", rc.model.rate_tp},
                {"rate_pair", rc.model.rate_pair},
                {"switch_epoch", rc.model.switch_epoch},
                {"rbf_size", rc.model.rbf_size},
                {"rbf_alpha", rc.model.rbf_alpha},
                {"cutoff", rc.model.cutoff},
                {"global_connect_radius", rc.model.global_connect_radius},
                {"basis", rc.model.basis},
                {"seed", rc.model.seed}}},
              {"data",
               {{"n_molecules", rc.n_molecules},
                {"min_atoms", rc.min_atoms},
                {"max_atoms", rc.max_atoms}}},
              {"train",
               {{"epochs", rc.train.epochs},
                {"lr", rc.train.lr},
                {"warmup_steps", rc.train.warmup_steps},
                {"eval_fraction", rc.eval_fraction}}}};
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------- timing harness ---------------------------------------------------

struct Timing {
  double median_ns = 0.0;
  double mad_ns = 0.0;
};

template <typename F>
Timing time_body(F&& body, int warmup = 3, int repeats = 5) {
  using clock = std::chrono::steady_clock;
  for (int i = 0; i < warmup; ++i) body();
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = clock::now();
    body();
    t.push_back(std::chrono::duration<double, std::nano>(clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  Timing out;
  out.median_ns = t[t.size() / 2];
  std::vector<double> dev;
  for (double v : t) dev.push_back(std::abs(v - out.median_ns));
  std::sort(dev.begin(), dev.end());
  out.mad_ns = dev[dev.size() / 2];
  return out;
}

// ---------- dataset directory ------------------------------------------------

void write_dataset(const std::string& out_dir, const RunConfig& rc, bool force) {
  const fs::path dir(out_dir);
  if (fs::exists(dir) && !fs::is_empty(dir) && !force)
    throw std::runtime_error("gen-data: output directory '" + out_dir +
                             "' is not empty (use --force to overwrite)");
  fs::create_directories(dir);

  const Dataset ds = generate_teacher_dataset(rc.model, rc.model.seed, rc.n_molecules,
                                              rc.min_atoms, rc.max_atoms);
  json manifest;
  manifest["seed"] = rc.model.seed;
  manifest["basis"] = ds.basis;
  manifest["count"] = ds.samples.size();
  manifest["config"] = echo_config(rc);
  json mols = json::array();
  for (size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    char stem[32];
    std::snprintf(stem, sizeof(stem), "mol_%05zu", i);
    const std::string xyz_name = std::string(stem) + ".xyz";
    const std::string mat_name = std::string(stem) + ".h.bin";

    XyzRecord rec;
    rec.comment = "molecule " + std::to_string(i);
    rec.z = s.mol.atomic_numbers();
    for (int a = 0; a < s.mol.natoms(); ++a) rec.pos.push_back(s.mol.position(a));
    write_xyz_file((dir / xyz_name).string(), rec);
    write_matrix_file((dir / mat_name).string(), s.h_ref, s.dim);

    mols.push_back(json{{"id", i},
                        {"natoms", s.mol.natoms()},
                        {"dim", s.dim},
                        {"xyz", xyz_name},
                        {"matrix", mat_name},
                        {"xyz_checksum", hex64(file_checksum((dir / xyz_name).string()))},
                        {"matrix_checksum", hex64(file_checksum((dir / mat_name).string()))}});
  }
  manifest["molecules"] = std::move(mols);
  std::ofstream mf(dir / "manifest.json");
  mf << manifest.dump(2) << "\n";
  std::cout << "wrote " << ds.samples.size() << " molecules to " << out_dir << "\n";
  std::cout << echo_config(rc).dump(2) << "\n";
}

Dataset load_dataset(const std::string& data_dir, double cutoff) {
  const fs::path dir(data_dir);
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw format_error("dataset: cannot open manifest in '" + data_dir + "'");
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw format_error(std::string("dataset: invalid manifest: ") + e.what());
  }
  Dataset ds;
  ds.seed = manifest.value("seed", 0ULL);
  ds.basis = manifest.value("basis", "toy-svp");
  for (const json& m : manifest.at("molecules")) {
    const std::string xyz_path = (dir / m.at("xyz").get<std::string>()).string();
    const std::string mat_path = (dir / m.at("matrix").get<std::string>()).string();
    if (hex64(file_checksum(xyz_path)) != m.at("xyz_checksum").get<std::string>())
      throw format_error("dataset: checksum mismatch for " + xyz_path);
    if (hex64(file_checksum(mat_path)) != m.at("matrix_checksum").get<std::string>())
      throw format_error("dataset: checksum mismatch for " + mat_path);
    const XyzRecord rec = read_xyz_file(xyz_path);
    Sample s;
    s.mol = MoleculeGraph(rec.z, rec.pos, cutoff);
    s.h_ref = read_matrix_file(mat_path, s.dim);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

// ---------- commands ----------------------------------------------------------

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir) {
  const RunConfig rc = parse_config(config_path);
  Dataset all = load_dataset(data_dir, rc.model.cutoff);
  if (all.samples.empty()) throw std::runtime_error("train: dataset is empty");

  const size_t n_eval = std::max<size_t>(
      1, static_cast<size_t>(rc.eval_fraction * static_cast<double>(all.samples.size())));
  Dataset train_set, eval_set;
  train_set.basis = eval_set.basis = all.basis;
  train_set.seed = eval_set.seed = all.seed;
  const size_t n_train = all.samples.size() > n_eval ? all.samples.size() - n_eval : 1;
  train_set.samples.assign(all.samples.begin(), all.samples.begin() + static_cast<long>(n_train));
  eval_set.samples.assign(all.samples.begin() + static_cast<long>(n_train), all.samples.end());
  if (eval_set.samples.empty()) eval_set.samples.push_back(train_set.samples.back());

  fs::create_directories(out_dir);
  std::cout << echo_config(rc).dump(2) << "\n";

  ad::ParamStore store;
  Model model(rc.model, store);
  const TrainResult res = train_loop(model, store, train_set, eval_set, rc.train);

  const fs::path dir(out_dir);
  std::ofstream csv(dir / "trace.csv");
  csv << "epoch,loss_mae,loss_mse,H_mae,eps_mae,psi\n";
  char line[256];
  for (const EpochMetrics& m : res.trace) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.epoch, m.loss_mae,
                  m.loss_mse, m.h_mae, m.eps_mae, m.psi);
    csv << line;
  }
  save_checkpoint((dir / "model.ckpt").string(), model, store, res.steps, rc.train.epochs - 1);
  std::cout << "trained " << rc.train.epochs << " epochs; final held-out H MAE "
            << res.trace.back().h_mae << "\n";
  return 0;
}

int cmd_equivariance_check(const std::string& ckpt_path, int trials) {
  LoadedCheckpoint lc = load_checkpoint(ckpt_path);
  const BasisSpec& basis = lc.model->basis();
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const MoleculeGraph mol = random_molecule(basis, 0xEC5EED, trial, 3, 8,
                                              lc.model->config().cutoff);
    const int n = basis.total_dim(mol);
    const auto h = lc.model->predict(*lc.store, mol, lc.epoch, false);
    const Rotation R = Rotation::random(40 + static_cast<std::uint64_t>(trial));
    const std::array<double, 3> shift = {0.31 * trial, -0.17 * trial, 0.57};
    std::vector<std::array<double, 3>> pos;
    for (int i = 0; i < mol.natoms(); ++i) {
      const auto q = R.apply(mol.position(i));
      pos.push_back({q[0] + shift[0], q[1] + shift[1], q[2] + shift[2]});
    }
    const MoleculeGraph moved(mol.atomic_numbers(), pos, mol.cutoff());
    const auto h2 = lc.model->predict(*lc.store, moved, lc.epoch, false);

    // Expected: per-atom block-diagonal Wigner-D conjugation.
    const auto offs = basis.atom_offsets(mol);
    std::vector<double> D(static_cast<size_t>(n) * n, 0.0);
    for (int a = 0; a < mol.natoms(); ++a) {
      int off = offs[static_cast<size_t>(a)];
      for (int l : basis.orbitals(mol.z(a))) {
        const WignerD Dl = wigner_d(l, R);
        const int w = 2 * l + 1;
        for (int r = 0; r < w; ++r)
          for (int c = 0; c < w; ++c)
            D[static_cast<size_t>(off + r) * n + (off + c)] = Dl.at(r, c);
        off += w;
      }
    }
    std::vector<double> tmp(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> expected(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int kk = 0; kk < n; ++kk) {
        const double d = D[static_cast<size_t>(i) * n + kk];
        if (d == 0.0) continue;
        for (int jj = 0; jj < n; ++jj)
          tmp[static_cast<size_t>(i) * n + jj] += d * h[static_cast<size_t>(kk) * n + jj];
      }
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj)
        for (int kk = 0; kk < n; ++kk)
          expected[static_cast<size_t>(i) * n + jj] +=
              tmp[static_cast<size_t>(i) * n + kk] * D[static_cast<size_t>(jj) * n + kk];
    for (size_t i = 0; i < h2.size(); ++i)
      worst = std::max(worst, std::abs(h2[i] - expected[i]));
  }
  std::printf("equivariance-check: %d trials, max block deviation %.3e\n", trials, worst);
  return worst > 1e-7 ? 1 : 0;
}

int cmd_bench_tp_order(const std::vector<int>& lmax_list, int channels) {
  std::printf("L,cost,time_ns_median,time_ns_mad\n");
  for (int L : lmax_list) {
    const IrrepsLayout lay = IrrepsLayout::uniform(channels, L);
    const auto plan = build_plan(lay, lay, lay, enumerate_paths(L));
    EquivariantVector x(lay), y(lay);
    for (size_t i = 0; i < x.values.size(); ++i) x.values[i] = 0.1 + 0.001 * static_cast<double>(i % 97);
    for (size_t i = 0; i < y.values.size(); ++i) y.values[i] = 0.2 - 0.001 * static_cast<double>(i % 89);
    std::vector<double> w(static_cast<size_t>(plan.weight_count()), 0.5);
    const Timing t = time_body([&] {
      volatile double sink = tp_forward(plan, x, y, w).values[0];
      (void)sink;
    });
    std::printf("%d,%lld,%.0f,%.0f\n", L, static_cast<long long>(dense_cost(plan)), t.median_ns,
                t.mad_ns);
  }
  return 0;
}

int cmd_bench_sparsity(int lmax, int channels, const std::vector<double>& k_list) {
  const IrrepsLayout lay = IrrepsLayout::uniform(channels, lmax);
  const auto universe = enumerate_paths(lmax);
  EquivariantVector x(lay), y(lay);
  for (size_t i = 0; i < x.values.size(); ++i) x.values[i] = 0.1 + 0.001 * static_cast<double>(i % 97);
  for (size_t i = 0; i < y.values.size(); ++i) y.values[i] = 0.2 - 0.001 * static_cast<double>(i % 89);
  std::printf("k,paths,cost,time_ns_median,time_ns_mad\n");
  for (double k : k_list) {
    if (k < 0.0 || k >= 1.0) throw std::runtime_error("bench sparsity: k must lie in [0,1)");
    const int count = static_cast<int>(
        std::ceil((1.0 - k) * static_cast<double>(universe.size())));
    const std::vector<PathTriple> subset(universe.begin(), universe.begin() + count);
    const auto plan = build_plan(lay, lay, lay, subset);
    std::vector<double> w(static_cast<size_t>(plan.weight_count()), 0.5);
    const Timing t = time_body([&] {
      volatile double sink = tp_forward(plan, x, y, w).values[0];
      (void)sink;
    });
    std::printf("%.3f,%d,%lld,%.0f,%.0f\n", k, count, static_cast<long long>(dense_cost(plan)),
                t.median_ns, t.mad_ns);
  }
  return 0;
}

int cmd_bench_pairs(const std::vector<int>& n_list, int channels, int lmax) {
  const IrrepsLayout lay = IrrepsLayout::uniform(channels, lmax);
  const auto plan = build_plan(lay, lay, lay, enumerate_paths(lmax));
  std::vector<double> w(static_cast<size_t>(plan.weight_count()), 0.5);
  std::printf("N,pairs,time_ns_median,time_ns_mad\n");
  for (int N : n_list) {
    if (N < 2) throw std::runtime_error("bench pairs: atom counts must be >= 2");
    std::vector<EquivariantVector> feats(static_cast<size_t>(N), EquivariantVector(lay));
    for (int i = 0; i < N; ++i)
      for (size_t d = 0; d < feats[static_cast<size_t>(i)].values.size(); ++d)
        feats[static_cast<size_t>(i)].values[d] = 0.05 * ((i * 31 + static_cast<int>(d)) % 41 - 20);
    const Timing t = time_body([&] {
      double sink = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
          sink += tp_forward(plan, feats[static_cast<size_t>(i)], feats[static_cast<size_t>(j)],
                             w)
                      .values[0];
      volatile double s = sink;
      (void)s;
    });
    std::printf("%d,%d,%.0f,%.0f\n", N, N * (N - 1) / 2, t.median_ns, t.mad_ns);
  }
  return 0;
}

void dump_tp_gate(const std::string& name, SparseTPGate& gate, const ad::ParamStore& store,
                  int epoch) {
  const auto scores = gate.scores(store);
  const auto& universe = gate.universe();
  std::vector<int> selected;
  const SparsityPhase phase = gate.scheduler().phase(epoch);
  if (phase == SparsityPhase::random_select) {
    std::printf("# warning: %s is in the random phase; selection is stochastic per batch\n",
                name.c_str());
    selected = top_indices(scores, gate.scheduler().target_count());
  } else if (phase == SparsityPhase::fixed && gate.scheduler().has_frozen()) {
    selected = gate.scheduler().frozen_set();
  } else {
    selected = top_indices(scores, gate.scheduler().target_count());
  }
  std::vector<bool> is_sel(universe.size(), false);
  for (int i : selected) is_sel[static_cast<size_t>(i)] = true;

  // Sort by descending weight, ties by ascending index.
  std::vector<int> order(universe.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
  });

  std::printf("gate,%s\nrank,comb,weight,selected\n", name.c_str());
  for (size_t r = 0; r < order.size(); ++r) {
    const int i = order[r];
    const PathTriple& p = universe[static_cast<size_t>(i)];
    std::printf("%zu,(%d;%d;%d),%.17g,%d\n", r + 1, p[0], p[1], p[2],
                scores[static_cast<size_t>(i)], is_sel[static_cast<size_t>(i)] ? 1 : 0);
  }
}

int cmd_inspect_gates(const std::string& ckpt_path) {
  LoadedCheckpoint lc = load_checkpoint(ckpt_path);
  dump_tp_gate("diag", lc.model->diag_gate(), *lc.store, lc.epoch);
  dump_tp_gate("nondiag", lc.model->nondiag_gate(), *lc.store, lc.epoch);
  std::printf("# pair gates score molecule pairs at run time; no static dump\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equivariant Hamiltonian prediction with adaptive sparsity"};
  app.require_subcommand(1);

  std::string config_path, data_dir, out_dir, ckpt_path;
  bool force = false;
  int trials = 20, channels = 32, lmax = 6;
  std::vector<int> lmax_list{1, 2, 3, 4, 5, 6};
  std::vector<double> k_list{0.0, 0.3, 0.5, 0.7, 0.9};
  std::vector<int> n_list{16, 32, 64, 128};

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic labeled dataset");
  gen->add_option("--config", config_path, "run config JSON")->required();
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_flag("--force", force, "overwrite a non-empty output directory");

  auto* train = app.add_subcommand("train", "train on a generated dataset");
  train->add_option("--config", config_path, "run config JSON")->required();
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_dir, "output directory")->required();

  auto* eq = app.add_subcommand("equivariance-check", "verify rotation/translation behavior");
  eq->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  eq->add_option("--trials", trials, "number of random trials");

  auto* bench = app.add_subcommand("bench", "scaling benchmarks (CSV on stdout)");
  bench->require_subcommand(1);
  auto* bto = bench->add_subcommand("tp-order", "tensor-product cost and time vs order");
  bto->add_option("--lmax-list", lmax_list, "orders to measure (ascending)");
  bto->add_option("--channels", channels, "channel count");
  auto* bsp = bench->add_subcommand("sparsity", "tensor-product time vs sparsity rate");
  bsp->add_option("--lmax", lmax, "order");
  bsp->add_option("--channels", channels, "channel count");
  bsp->add_option("--k-list", k_list, "sparsity rates in [0,1)");
  auto* bpr = bench->add_subcommand("pairs", "pair-construction time vs atom count");
  bpr->add_option("--n-list", n_list, "atom counts (>= 2)");
  bpr->add_option("--channels", channels, "channel count");
  bpr->add_option("--lmax", lmax, "order");

  auto* ig = app.add_subcommand("inspect-gates", "dump gate scores and selections");
  ig->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      write_dataset(out_dir, parse_config(config_path), force);
      return 0;
    }
    if (train->parsed()) return cmd_train(config_path, data_dir, out_dir);
    if (eq->parsed()) return cmd_equivariance_check(ckpt_path, trials);
    if (bench->parsed()) {
      if (bto->parsed()) {
        if (!std::is_sorted(lmax_list.begin(), lmax_list.end()))
          throw std::runtime_error("bench tp-order: --lmax-list must be ascending");
        return cmd_bench_tp_order(lmax_list, channels);
      }
      if (bsp->parsed()) return cmd_bench_sparsity(lmax, channels, k_list);
      if (bpr->parsed()) return cmd_bench_pairs(n_list, channels, lmax);
    }
    if (ig->parsed()) return cmd_inspect_gates(ckpt_path);
  } catch (const format_error& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
