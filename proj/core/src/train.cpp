#include "sphnet/train.hpp"

#include <cmath>

#include "sphnet/errors.hpp"
#include "sphnet/metrics.hpp"

namespace sphnet {

void adam_step(ad::ParamStore& store, std::uint64_t step, double lr, double beta1, double beta2,
               double eps) {
  const double t = static_cast<double>(step);
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  for (int p = 0; p < store.count(); ++p) {
    auto& pr = store.at(p);
    for (size_t i = 0; i < pr.value.size(); ++i) {
      const double g = pr.grad[i];
      pr.m1[i] = beta1 * pr.m1[i] + (1.0 - beta1) * g;
      pr.m2[i] = beta2 * pr.m2[i] + (1.0 - beta2) * g * g;
      pr.value[i] -= lr * (pr.m1[i] / bc1) / (std::sqrt(pr.m2[i] / bc2) + eps);
    }
  }
}

EpochMetrics evaluate(Model& model, ad::ParamStore& store, const Dataset& ds, int epoch) {
  EpochMetrics m;
  m.epoch = epoch;
  if (ds.samples.empty()) return m;
  for (const Sample& s : ds.samples) {
    const std::vector<double> pred = model.predict(store, s.mol, epoch);
    m.h_mae += h_mae(pred, s.h_ref);
    std::vector<double> overlap(static_cast<size_t>(s.dim) * s.dim, 0.0);
    for (int i = 0; i < s.dim; ++i) overlap[static_cast<size_t>(i * s.dim + i)] = 1.0;
    const int n_occ = std::min(occupied_count(s.mol), s.dim);
    m.eps_mae += epsilon_mae(pred, s.h_ref, overlap, s.dim, n_occ);
    m.psi += psi_similarity(pred, s.h_ref, overlap, s.dim, n_occ);
  }
  const double n = static_cast<double>(ds.samples.size());
  m.h_mae /= n;
  m.eps_mae /= n;
  m.psi /= n;
  return m;
}

TrainResult train_loop(Model& model, ad::ParamStore& store, const Dataset& train_set,
                       const Dataset& eval_set, const TrainConfig& tc) {
  if (train_set.samples.empty()) throw config_error("train: empty training set");
  TrainResult result;
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    double sum_mae = 0.0, sum_mse = 0.0;
    for (const Sample& s : train_set.samples) {
      ad::Tape tape;
      ad::Binding b(tape, store);
      const ForwardOutput fo = model.forward(b, s.mol, epoch);
      const int ref = ad::constant(tape, s.h_ref);
      const int loss = ad::mae_mse_loss(tape, fo.h_node, ref);
      const double loss_val = tape.val(loss)[0];
      if (!std::isfinite(loss_val))
        throw numeric_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                            ", step " + std::to_string(step));
      const auto& pred = tape.val(fo.h_node);
      sum_mae += h_mae(pred, s.h_ref);
      sum_mse += loss_val - h_mae(pred, s.h_ref);

      store.zero_grad();
      tape.backward(loss);
      b.harvest();
      ++step;
      const double warm = tc.warmup_steps > 0
                              ? std::min(1.0, static_cast<double>(step) / tc.warmup_steps)
                              : 1.0;
      double lr = tc.lr * warm;
      if (tc.final_lr_fraction < 1.0 && step > static_cast<std::uint64_t>(tc.warmup_steps)) {
        const std::uint64_t total =
            static_cast<std::uint64_t>(tc.epochs) * train_set.samples.size();
        const double span = static_cast<double>(
            total > static_cast<std::uint64_t>(tc.warmup_steps) ? total - tc.warmup_steps : 1);
        const double prog = std::min(1.0, static_cast<double>(step - tc.warmup_steps) / span);
        const double floor_lr = tc.lr * tc.final_lr_fraction;
        lr = floor_lr + (tc.lr - floor_lr) * 0.5 * (1.0 + std::cos(prog * 3.14159265358979323846));
      }
      adam_step(store, step, lr, tc.beta1, tc.beta2, tc.adam_eps);
    }
    // The adaptive epoch's selection is frozen after its final update.
    if (epoch == model.config().switch_epoch) model.freeze_gates();

    EpochMetrics m = evaluate(model, store, eval_set, epoch);
    m.epoch = epoch;
    m.loss_mae = sum_mae / static_cast<double>(train_set.samples.size());
    m.loss_mse = sum_mse / static_cast<double>(train_set.samples.size());
    result.trace.push_back(m);
  }
  result.steps = step;
  return result;
}

GradCheckReport grad_check(Model& model, ad::ParamStore& store, const MoleculeGraph& mol,
                           const std::vector<double>& h_ref, int epoch, double fd_step,
                           int max_per_param) {
  // Analytic gradients.
  store.zero_grad();
  {
    ad::Tape tape;
    ad::Binding b(tape, store);
    const ForwardOutput fo = model.forward(b, mol, epoch);
    const int loss = ad::mae_mse_loss(tape, fo.h_node, ad::constant(tape, h_ref));
    tape.backward(loss);
    b.harvest();
  }

  auto loss_at = [&]() {
    ad::Tape tape;
    ad::Binding b(tape, store);
    const ForwardOutput fo = model.forward(b, mol, epoch);
    const int loss = ad::mae_mse_loss(tape, fo.h_node, ad::constant(tape, h_ref));
    return tape.val(loss)[0];
  };

  GradCheckReport report;
  for (int p = 0; p < store.count(); ++p) {
    auto& pr = store.at(p);
    const int n = static_cast<int>(pr.value.size());
    const int stride = std::max(1, n / max_per_param);
    for (int i = 0; i < n; i += stride) {
      const double saved = pr.value[static_cast<size_t>(i)];
      pr.value[static_cast<size_t>(i)] = saved + fd_step;
      const double lp = loss_at();
      pr.value[static_cast<size_t>(i)] = saved - fd_step;
      const double lm = loss_at();
      pr.value[static_cast<size_t>(i)] = saved;
      const double fd = (lp - lm) / (2.0 * fd_step);
      const double an = pr.grad[static_cast<size_t>(i)];
      const double rel = std::abs(fd - an) / std::max(1e-6, std::abs(fd) + std::abs(an));
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst_param = pr.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace sphnet
