#pragma once

#include <array>

#include "relnav/numeric/graph.hpp"

namespace relnav::rel {

// Which of the three fused inputs are active. A disabled branch contributes
// exactly zero: its logit is excluded from the softmax and its input is
// never touched, the "logit pinned to -infinity" semantics.
struct FusionMask {
  bool raw = true;       // alpha_1, projected object features
  bool temporal = true;  // alpha_2, temporal relation features
  bool spatial = true;   // alpha_3, spatial relation features
};

// Registers "rel.alpha_logits" so that softmax(logits) equals alpha_init.
// Entries of alpha_init must be positive for enabled branches.
void init_fusion_params(numeric::ParamStore& store, const std::array<double, 3>& alpha_init);

// Q_t = alpha_1 O_t + alpha_2 M_t + alpha_3 N_t with the alphas produced by
// a softmax over learnable logits, so they stay on the simplex after every
// optimizer step by construction. Disabled branches may pass an undefined
// Var.
numeric::Var fuse(numeric::Graph& g, numeric::ParamStore& store, numeric::Var raw,
                  numeric::Var temporal, numeric::Var spatial, const FusionMask& mask);

// Current fusion weights (softmax over the enabled logits, zeros elsewhere).
std::array<double, 3> fusion_weights(const numeric::ParamStore& store, const FusionMask& mask);

}  // namespace relnav::rel
