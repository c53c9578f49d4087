#include "sphnet/expansion.hpp"

#include <cmath>
#include <cstdlib>

namespace sphnet {

ExpansionPlan::ExpansionPlan(const IrrepsLayout& input, const IrrepsLayout& rows,
                             const IrrepsLayout& cols)
    : input_(input), rows_(rows), cols_(cols) {
  for (int e = 0; e < input.num_entries(); ++e) {
    if (channels_ == 0) channels_ = input.entry(e).mul;
    if (input.entry(e).mul != channels_)
      throw config_error("ExpansionPlan: input multiplicities must agree");
  }
  const int lmax_in = input.lmax();
  for (int a = 0; a < rows.num_entries(); ++a)
    for (int b = 0; b < cols.num_entries(); ++b) {
      const int la = rows.entry(a).l, lb = cols.entry(b).l;
      if (std::abs(la - lb) > lmax_in)
        throw config_error("ExpansionPlan: required input order exceeds the feature order");
      for (int lin = std::abs(la - lb); lin <= la + lb; ++lin) {
        // Couplings above the feature order are dropped; every orbital pair
        // keeps at least its lowest admissible coupling.
        if (lin > lmax_in) continue;
        ExpansionPath p;
        p.row_entry = a;
        p.col_entry = b;
        p.l_row = la;
        p.l_col = lb;
        p.l_in = lin;
        p.in_entry = input.find_l(lin);
        paths_.push_back(p);
        cg_.push_back(&CGTable::instance().block(la, lb, lin));
      }
    }
}

int ExpansionPlan::bias_count() const {
  int n = 0;
  for (const ExpansionPath& p : paths_)
    if (p.l_in == 0) ++n;
  return n;
}

std::vector<double> tensor_expansion(const ExpansionPlan& plan, const EquivariantVector& f,
                                     const std::vector<double>& filter_weights,
                                     const std::vector<double>& bias) {
  if (f.layout != plan.input_) throw contract_error("tensor_expansion: feature layout mismatch");
  if (static_cast<int>(filter_weights.size()) != plan.weight_count())
    throw config_error("tensor_expansion: filter weight count mismatch");
  if (static_cast<int>(bias.size()) != plan.bias_count())
    throw config_error("tensor_expansion: bias count mismatch");

  const int nrow = plan.rows_.total_dim();
  const int ncol = plan.cols_.total_dim();
  std::vector<double> m(static_cast<size_t>(nrow * ncol), 0.0);
  const int C = plan.channels_;
  int bi = 0;
  for (size_t pi = 0; pi < plan.paths_.size(); ++pi) {
    const ExpansionPath& p = plan.paths_[pi];
    const std::vector<double>& cg = *plan.cg_[pi];
    const int da = 2 * p.l_row + 1, db = 2 * p.l_col + 1, dk = 2 * p.l_in + 1;
    const int ra = plan.rows_.offset(p.row_entry);
    const int rb = plan.cols_.offset(p.col_entry);
    for (int mi = 0; mi < da; ++mi)
      for (int mj = 0; mj < db; ++mj) {
        const double* cgv = &cg[static_cast<size_t>((mi * db + mj) * dk)];
        double acc = 0.0;
        for (int c = 0; c < C; ++c) {
          const double w = filter_weights[static_cast<size_t>(pi) * static_cast<size_t>(C) + static_cast<size_t>(c)];
          const double* fv = &f.values[static_cast<size_t>(f.layout.index(p.in_entry, c, -p.l_in))];
          double s = 0.0;
          for (int mo = 0; mo < dk; ++mo) s += cgv[mo] * fv[mo];
          acc += w * s;
        }
        if (p.l_in == 0) acc += bias[static_cast<size_t>(bi)] * cgv[0];
        m[static_cast<size_t>((ra + mi) * ncol + (rb + mj))] += acc;
      }
    if (p.l_in == 0) ++bi;
  }
  return m;
}

void tensor_expansion_backward(const ExpansionPlan& plan, const EquivariantVector& f,
                               const std::vector<double>& filter_weights,
                               const std::vector<double>& grad_m, std::vector<double>& grad_f,
                               std::vector<double>& grad_w, std::vector<double>& grad_bias) {
  grad_f.assign(static_cast<size_t>(plan.input_.total_dim()), 0.0);
  grad_w.assign(static_cast<size_t>(plan.weight_count()), 0.0);
  grad_bias.assign(static_cast<size_t>(plan.bias_count()), 0.0);

  const int ncol = plan.cols_.total_dim();
  const int C = plan.channels_;
  int bi = 0;
  for (size_t pi = 0; pi < plan.paths_.size(); ++pi) {
    const ExpansionPath& p = plan.paths_[pi];
    const std::vector<double>& cg = *plan.cg_[pi];
    const int da = 2 * p.l_row + 1, db = 2 * p.l_col + 1, dk = 2 * p.l_in + 1;
    const int ra = plan.rows_.offset(p.row_entry);
    const int rb = plan.cols_.offset(p.col_entry);
    for (int mi = 0; mi < da; ++mi)
      for (int mj = 0; mj < db; ++mj) {
        const double g = grad_m[static_cast<size_t>((ra + mi) * ncol + (rb + mj))];
        if (g == 0.0) continue;
        const double* cgv = &cg[static_cast<size_t>((mi * db + mj) * dk)];
        for (int c = 0; c < C; ++c) {
          const size_t wi = static_cast<size_t>(pi) * static_cast<size_t>(C) + static_cast<size_t>(c);
          const double w = filter_weights[wi];
          const double* fv = &f.values[static_cast<size_t>(f.layout.index(p.in_entry, c, -p.l_in))];
          double* gf = &grad_f[static_cast<size_t>(f.layout.index(p.in_entry, c, -p.l_in))];
          double s = 0.0;
          for (int mo = 0; mo < dk; ++mo) {
            s += cgv[mo] * fv[mo];
            gf[mo] += g * w * cgv[mo];
          }
          grad_w[wi] += g * s;
        }
        if (p.l_in == 0) grad_bias[static_cast<size_t>(bi)] += g * cgv[0];
      }
    if (p.l_in == 0) ++bi;
  }
}

}  // namespace sphnet
