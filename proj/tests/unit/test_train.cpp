#include <cmath>

#include "doctest.h"
#include "sphnet/dataset.hpp"
#include "sphnet/metrics.hpp"
#include "sphnet/train.hpp"

using namespace sphnet;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.lmax = 4;
  cfg.channels = 2;
  cfg.n_vectorial = 1;
  cfg.seed = 21;
  return cfg;
}

}  // namespace

TEST_CASE("dataset generation is deterministic and respects constraints") {
  const ModelConfig cfg = tiny_config();
  const Dataset a = generate_teacher_dataset(cfg, 5, 6, 3, 6);
  const Dataset b = generate_teacher_dataset(cfg, 5, 6, 3, 6);
  REQUIRE(a.samples.size() == 6);
  const BasisSpec basis = BasisSpec::toy_svp();
  for (size_t s = 0; s < a.samples.size(); ++s) {
    const auto& sa = a.samples[s];
    const auto& sb = b.samples[s];
    CHECK(sa.mol.natoms() >= 3);
    CHECK(sa.mol.natoms() <= 6);
    CHECK(sa.mol.atomic_numbers() == sb.mol.atomic_numbers());
    CHECK(sa.h_ref == sb.h_ref);
    CHECK(sa.dim == basis.total_dim(sa.mol));
    REQUIRE(sa.h_ref.size() == static_cast<size_t>(sa.dim) * sa.dim);
    // labels are symmetric
    for (int i = 0; i < sa.dim; ++i)
      for (int j = 0; j < i; ++j)
        CHECK(sa.h_ref[static_cast<size_t>(i) * sa.dim + j] ==
              sa.h_ref[static_cast<size_t>(j) * sa.dim + i]);
    // minimum interatomic distance
    for (int i = 0; i < sa.mol.natoms(); ++i)
      for (int j = 0; j < i; ++j) CHECK(sa.mol.distance(i, j) >= 0.8);
  }
  // distinct seeds give different geometries
  const Dataset c = generate_teacher_dataset(cfg, 6, 6, 3, 6);
  CHECK(c.samples[0].h_ref != a.samples[0].h_ref);
}

TEST_CASE("adam_step moves parameters against the gradient") {
  ad::ParamStore store;
  const int p = store.add("p", {1.0, -1.0});
  store.at(p).grad = {0.5, -0.5};
  adam_step(store, 1, 0.1, 0.9, 0.999, 1e-8);
  CHECK(store.at(p).value[0] < 1.0);
  CHECK(store.at(p).value[1] > -1.0);
  // first bias-corrected step has magnitude ~ lr
  CHECK(std::abs(store.at(p).value[0] - (1.0 - 0.1)) < 1e-6);
}

TEST_CASE("grad_check passes on a small deterministic model") {
  ad::ParamStore store;
  Model model(tiny_config(), store);
  const Dataset ds = generate_teacher_dataset(tiny_config(), 9, 1, 4, 4);
  const auto& s = ds.samples[0];
  const auto report = grad_check(model, store, s.mol, s.h_ref, /*epoch=*/0, 1e-5, 2);
  INFO("worst parameter: " << report.worst_param);
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("short training run reduces the loss and records the trace") {
  const ModelConfig mcfg = tiny_config();
  ad::ParamStore store;
  Model model(mcfg, store);
  const Dataset train = generate_teacher_dataset(mcfg, 31, 8, 3, 5);
  const Dataset eval = generate_teacher_dataset(mcfg, 32, 3, 3, 5);

  const EpochMetrics before = evaluate(model, store, eval, 0);
  TrainConfig tc;
  tc.epochs = 6;
  tc.lr = 2e-3;
  tc.warmup_steps = 8;
  const TrainResult res = train_loop(model, store, train, eval, tc);
  REQUIRE(res.trace.size() == 6);
  CHECK(res.steps == 6u * 8u);
  for (size_t e = 0; e < res.trace.size(); ++e) {
    CHECK(res.trace[e].epoch == static_cast<int>(e));
    CHECK(std::isfinite(res.trace[e].loss_mae));
    CHECK(res.trace[e].psi >= 0.0);
    CHECK(res.trace[e].psi <= 1.0 + 1e-12);
  }
  CHECK(res.trace.back().h_mae < before.h_mae);
  CHECK(res.trace.back().loss_mae < res.trace.front().loss_mae);
}

TEST_CASE("training with sparsity freezes the gates at the switch epoch") {
  ModelConfig mcfg = tiny_config();
  mcfg.rate_tp = 0.4;
  mcfg.rate_pair = 0.3;
  mcfg.switch_epoch = 1;
  ad::ParamStore store;
  Model model(mcfg, store);
  const Dataset train = generate_teacher_dataset(mcfg, 41, 4, 3, 4);
  const Dataset eval = generate_teacher_dataset(mcfg, 42, 2, 3, 4);

  TrainConfig tc;
  tc.epochs = 3;
  tc.warmup_steps = 4;
  const TrainResult res = train_loop(model, store, train, eval, tc);
  REQUIRE(res.trace.size() == 3);
  CHECK(model.diag_gate().scheduler().has_frozen());
  CHECK(model.nondiag_gate().scheduler().has_frozen());
  CHECK(model.spherical_pair_gate().has_frozen());
  CHECK(model.nondiag_pair_gate().has_frozen());
  // fixed phase: predictions are stable across repeated calls
  const auto h1 = model.predict(store, eval.samples[0].mol, 2, false);
  const auto h2 = model.predict(store, eval.samples[0].mol, 2, false);
  CHECK(h1 == h2);
}
