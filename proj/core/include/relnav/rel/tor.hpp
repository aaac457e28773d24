#pragma once

#include "relnav/numeric/graph.hpp"
#include "relnav/numeric/rng.hpp"
#include "relnav/numeric/tensor.hpp"

namespace relnav::rel {

struct TorConfig {
  int d_obj = 16;
  int d_model = 32;
  // Cross-attention scores are row-softmaxed before mixing the noun
  // features. The raw unnormalized product is available for comparison.
  bool normalize_scores = true;
};

struct TorOutput {
  numeric::Var attention;  // T, m x noun_count (softmaxed unless disabled)
  numeric::Var features;   // M_t, m x d_model
  numeric::Var object_projection;  // FC(O_t), m x d_model, shared downstream
};

// Registers the object projection shared by the temporal-relation scores
// and the fused feature ("rel.fc_w"/"rel.fc_b").
void init_tor_params(numeric::ParamStore& store, const TorConfig& cfg, numeric::Rng& rng);

// Temporal object relations: cross-attention with the projected objects as
// queries and the contextual noun features as keys/values.
//   T   = row_softmax(FC(O_t) * W_hat^T)
//   M_t = T * W_hat
// Differentiable through O_t (constant here), the projection and W_hat.
TorOutput tor_forward(numeric::Graph& g, numeric::ParamStore& store,
                      const numeric::Tensor2& objects, numeric::Var noun_features,
                      const TorConfig& cfg);

}  // namespace relnav::rel
