#pragma once

#include <string>
#include <vector>

#include "sphnet/dataset.hpp"
#include "sphnet/model.hpp"

namespace sphnet {

struct TrainConfig {
  int epochs = 50;
  double lr = 1e-3;
  int warmup_steps = 100;  // linear warmup to peak
  // After warmup the rate follows a cosine from `lr` down to
  // `lr * final_lr_fraction` over the remaining steps; 1.0 keeps it constant.
  double final_lr_fraction = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct EpochMetrics {
  int epoch = 0;
  double loss_mae = 0.0;  // training MAE (epoch mean)
  double loss_mse = 0.0;  // training MSE (epoch mean)
  double h_mae = 0.0;     // evaluation set
  double eps_mae = 0.0;
  double psi = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> trace;
  std::uint64_t steps = 0;
};

// One Adam update over every parameter; lr already includes warmup scaling.
void adam_step(ad::ParamStore& store, std::uint64_t step, double lr, double beta1, double beta2,
               double eps);

// Evaluation metrics of the current model on a dataset (no gradients).
EpochMetrics evaluate(Model& model, ad::ParamStore& store, const Dataset& ds, int epoch);

// Full loop: per-sample Adam steps, gate phase transitions on the epoch
// counter, gate freeze after the final step of the adaptive epoch, one
// metric row per epoch. Throws numeric_error on non-finite loss.
TrainResult train_loop(Model& model, ad::ParamStore& store, const Dataset& train_set,
                       const Dataset& eval_set, const TrainConfig& tc);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
};

// Central finite differences (step `fd_step`) on up to `max_per_param`
// elements of every parameter group against the analytic gradient of the
// total loss. Run with deterministic gate selection (rate 0 or fixed phase).
GradCheckReport grad_check(Model& model, ad::ParamStore& store, const MoleculeGraph& mol,
                           const std::vector<double>& h_ref, int epoch, double fd_step = 1e-5,
                           int max_per_param = 4);

}  // namespace sphnet
