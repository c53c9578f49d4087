#pragma once

#include <vector>

#include "sphnet/clebsch_gordan.hpp"
#include "sphnet/irreps.hpp"

namespace sphnet {

// One expansion path: output row orbital a (order l_o1), output column
// orbital b (order l_o2), input pair-feature order l_in.
struct ExpansionPath {
  int row_entry = 0;  // into the row layout
  int col_entry = 0;  // into the column layout
  int in_entry = 0;   // into the input layout
  int l_row = 0, l_col = 0, l_in = 0;
};

// Converse of the tensor product: unfolds pair features f^{l_in} into dense
// (l_row, l_col) orbital blocks through the same CG tables.
class ExpansionPlan {
 public:
  ExpansionPlan() = default;
  // Enumerates all (row, col, l_in) paths compatible with the input layout.
  ExpansionPlan(const IrrepsLayout& input, const IrrepsLayout& rows, const IrrepsLayout& cols);

  const IrrepsLayout& input() const { return input_; }
  const IrrepsLayout& rows() const { return rows_; }
  const IrrepsLayout& cols() const { return cols_; }
  const std::vector<ExpansionPath>& paths() const { return paths_; }
  int channels() const { return channels_; }

  int weight_count() const { return static_cast<int>(paths_.size()) * channels_; }
  // Paths with l_in = 0 carry one bias scalar each.
  int bias_count() const;

 private:
  IrrepsLayout input_, rows_, cols_;
  std::vector<ExpansionPath> paths_;
  std::vector<const std::vector<double>*> cg_;
  int channels_ = 0;

  friend std::vector<double> tensor_expansion(const ExpansionPlan&, const EquivariantVector&,
                                              const std::vector<double>&,
                                              const std::vector<double>&);
  friend void tensor_expansion_backward(const ExpansionPlan&, const EquivariantVector&,
                                        const std::vector<double>&, const std::vector<double>&,
                                        std::vector<double>&, std::vector<double>&,
                                        std::vector<double>&);
};

// M[row, col] = sum over paths, channels and m_o of
//   F[path, c] * C^{(l_in, m_o)}_{(l_row, m_i), (l_col, m_j)} * f^{l_in}_{c, m_o}
// plus bias * C on l_in = 0 paths. Returns a dense row-major matrix of shape
// rows.total_dim() x cols.total_dim().
std::vector<double> tensor_expansion(const ExpansionPlan& plan, const EquivariantVector& f,
                                     const std::vector<double>& filter_weights,
                                     const std::vector<double>& bias);

void tensor_expansion_backward(const ExpansionPlan& plan, const EquivariantVector& f,
                               const std::vector<double>& filter_weights,
                               const std::vector<double>& grad_m, std::vector<double>& grad_f,
                               std::vector<double>& grad_w, std::vector<double>& grad_bias);

}  // namespace sphnet
