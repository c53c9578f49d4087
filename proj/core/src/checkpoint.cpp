#include "sphnet/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "sphnet/errors.hpp"

namespace sphnet {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw format_error("truncated checkpoint");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(os, v);
}

double get_f64(std::istream& is) {
  const std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

void put_str(std::ostream& os, const std::string& s) {
  put_u64(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_str(std::istream& is) {
  const std::uint64_t n = get_u64(is);
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n)))
    throw format_error("truncated checkpoint string");
  return s;
}

void put_vec(std::ostream& os, const std::vector<double>& v) {
  put_u64(os, v.size());
  for (double d : v) put_f64(os, d);
}

std::vector<double> get_vec(std::istream& is) {
  std::vector<double> v(get_u64(is));
  for (double& d : v) d = get_f64(is);
  return v;
}

void put_ivec(std::ostream& os, const std::vector<int>& v) {
  put_u64(os, v.size());
  for (int i : v) put_u64(os, static_cast<std::uint64_t>(i));
}

std::vector<int> get_ivec(std::istream& is) {
  std::vector<int> v(get_u64(is));
  for (int& i : v) i = static_cast<int>(get_u64(is));
  return v;
}

void put_tp_gate(std::ostream& os, SparseTPGate& g) {
  put_u64(os, g.scheduler().counter());
  put_u64(os, g.scheduler().has_frozen() ? 1 : 0);
  if (g.scheduler().has_frozen()) put_ivec(os, g.scheduler().frozen_set());
}

void get_tp_gate(std::istream& is, SparseTPGate& g) {
  g.scheduler().set_counter(get_u64(is));
  if (get_u64(is) != 0) g.scheduler().restore_frozen(get_ivec(is));
}

void put_pair_gate(std::ostream& os, SparsePairGate& g) {
  put_u64(os, g.counter());
  put_u64(os, g.has_frozen() ? 1 : 0);
}

void get_pair_gate(std::istream& is, SparsePairGate& g) {
  g.set_counter(get_u64(is));
  if (get_u64(is) != 0) g.mark_frozen();
}

}  // namespace

void save_checkpoint(const std::string& path, Model& model, const ad::ParamStore& store,
                     std::uint64_t step, int epoch) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot write checkpoint: " + path);
  f.write("SPHC", 4);
  put_u64(f, 1);  // version

  const ModelConfig& c = model.config();
  put_u64(f, static_cast<std::uint64_t>(c.lmax));
  put_u64(f, static_cast<std::uint64_t>(c.channels));
  put_u64(f, static_cast<std::uint64_t>(c.n_vectorial));
  put_f64(f, c.rate_tp);
  put_f64(f, c.rate_pair);
  put_u64(f, static_cast<std::uint64_t>(c.switch_epoch));
  put_u64(f, static_cast<std::uint64_t>(c.rbf_size));
  put_f64(f, c.rbf_alpha);
  put_f64(f, c.cutoff);
  put_f64(f, c.global_connect_radius);
  put_str(f, c.basis);
  put_u64(f, c.seed);

  put_u64(f, static_cast<std::uint64_t>(step));
  put_u64(f, static_cast<std::uint64_t>(epoch));

  put_u64(f, static_cast<std::uint64_t>(store.count()));
  for (int p = 0; p < store.count(); ++p) {
    const auto& pr = store.at(p);
    put_str(f, pr.name);
    put_vec(f, pr.value);
    put_vec(f, pr.m1);
    put_vec(f, pr.m2);
  }

  put_tp_gate(f, model.diag_gate());
  put_tp_gate(f, model.nondiag_gate());
  put_pair_gate(f, model.spherical_pair_gate());
  put_pair_gate(f, model.nondiag_pair_gate());
  if (!f) throw format_error("short checkpoint write: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot open checkpoint: " + path);
  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, "SPHC", 4) != 0)
    throw format_error("bad checkpoint magic: " + path);
  if (get_u64(f) != 1) throw format_error("unsupported checkpoint version: " + path);

  LoadedCheckpoint lc;
  ModelConfig& c = lc.config;
  c.lmax = static_cast<int>(get_u64(f));
  c.channels = static_cast<int>(get_u64(f));
  c.n_vectorial = static_cast<int>(get_u64(f));
  c.rate_tp = get_f64(f);
  c.rate_pair = get_f64(f);
  c.switch_epoch = static_cast<int>(get_u64(f));
  c.rbf_size = static_cast<int>(get_u64(f));
  c.rbf_alpha = get_f64(f);
  c.cutoff = get_f64(f);
  c.global_connect_radius = get_f64(f);
  c.basis = get_str(f);
  c.seed = get_u64(f);

  lc.step = get_u64(f);
  lc.epoch = static_cast<int>(get_u64(f));

  lc.store = std::make_unique<ad::ParamStore>();
  lc.model = std::make_unique<Model>(c, *lc.store);

  const std::uint64_t n_params = get_u64(f);
  if (n_params != static_cast<std::uint64_t>(lc.store->count()))
    throw format_error("checkpoint parameter count mismatch: " + path);
  for (int p = 0; p < lc.store->count(); ++p) {
    auto& pr = lc.store->at(p);
    const std::string name = get_str(f);
    if (name != pr.name) throw format_error("checkpoint parameter order mismatch: " + name);
    auto value = get_vec(f);
    auto m1 = get_vec(f);
    auto m2 = get_vec(f);
    if (value.size() != pr.value.size())
      throw format_error("checkpoint parameter size mismatch: " + name);
    pr.value = std::move(value);
    pr.m1 = std::move(m1);
    pr.m2 = std::move(m2);
  }

  get_tp_gate(f, lc.model->diag_gate());
  get_tp_gate(f, lc.model->nondiag_gate());
  get_pair_gate(f, lc.model->spherical_pair_gate());
  get_pair_gate(f, lc.model->nondiag_pair_gate());
  return lc;
}

}  // namespace sphnet
