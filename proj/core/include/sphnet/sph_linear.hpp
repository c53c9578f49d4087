#pragma once

#include <vector>

#include "sphnet/irreps.hpp"

namespace sphnet {

// Per-order equivariant linear map: channels of every order l are mixed by a
// dedicated weight block, never across orders; bias acts on l = 0 only.
struct SphLinearSpec {
  IrrepsLayout in;
  IrrepsLayout out;

  SphLinearSpec() = default;
  SphLinearSpec(IrrepsLayout input, IrrepsLayout output);

  // Weights are stored entry-pair-major: for each output entry (in order),
  // a dense (out_mul x in_mul) block mapping the input entry of the same l.
  int weight_count() const;
  int bias_count() const;  // out channels of l = 0 entries

  // Weight vector representing the identity map (requires in == out).
  std::vector<double> identity_weights() const;
};

EquivariantVector sph_linear(const SphLinearSpec& spec, const std::vector<double>& weights,
                             const std::vector<double>& bias, const EquivariantVector& x);

void sph_linear_backward(const SphLinearSpec& spec, const std::vector<double>& weights,
                         const EquivariantVector& x, const std::vector<double>& grad_out,
                         std::vector<double>& grad_w, std::vector<double>& grad_b,
                         std::vector<double>& grad_x);

}  // namespace sphnet
