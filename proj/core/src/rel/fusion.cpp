#include "relnav/rel/fusion.hpp"

#include <cmath>
#include <vector>

#include "relnav/common/error.hpp"

namespace relnav::rel {

using numeric::Graph;
using numeric::ParamStore;
using numeric::Tensor2;
using numeric::Var;

void init_fusion_params(ParamStore& store, const std::array<double, 3>& alpha_init) {
  Tensor2 logits(1, 3, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    if (alpha_init[i] < 0.0) {
      throw ContractError("init_fusion_params: alpha_init entries must be nonnegative");
    }
    // Zero-weight branches get a strongly negative logit; they are normally
    // excluded by the mask as well.
    logits.at(0, i) = alpha_init[i] > 0.0 ? std::log(alpha_init[i]) : -40.0;
  }
  store.create("rel.alpha_logits", std::move(logits));
}

namespace {

std::vector<std::size_t> enabled_indices(const FusionMask& mask) {
  std::vector<std::size_t> idx;
  if (mask.raw) idx.push_back(0);
  if (mask.temporal) idx.push_back(1);
  if (mask.spatial) idx.push_back(2);
  if (idx.empty()) throw ContractError("fuse: at least one fusion branch must be enabled");
  return idx;
}

}  // namespace

Var fuse(Graph& g, ParamStore& store, Var raw, Var temporal, Var spatial,
         const FusionMask& mask) {
  const std::vector<std::size_t> idx = enabled_indices(mask);
  const Var inputs[3] = {raw, temporal, spatial};
  for (std::size_t i : idx) {
    if (!inputs[i].defined()) {
      throw ContractError("fuse: enabled branch " + std::to_string(i) + " has no input");
    }
  }
  for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
    numeric::require_same_shape(inputs[idx[a]].value(), inputs[idx[a + 1]].value(), "fuse");
  }

  Var alphas = g.row_softmax(g.gather_cols(g.param(store, "rel.alpha_logits"), idx));
  Var out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    Var term = g.scalar_mul(g.pick(alphas, 0, k), inputs[idx[k]]);
    out = out.defined() ? g.add(out, term) : term;
  }
  return out;
}

std::array<double, 3> fusion_weights(const ParamStore& store, const FusionMask& mask) {
  const std::vector<std::size_t> idx = enabled_indices(mask);
  const Tensor2& logits = store.value("rel.alpha_logits");
  double mx = logits.at(0, idx[0]);
  for (std::size_t i : idx) mx = std::max(mx, logits.at(0, i));
  double denom = 0.0;
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (std::size_t i : idx) {
    out[i] = std::exp(logits.at(0, i) - mx);
    denom += out[i];
  }
  for (std::size_t i : idx) out[i] /= denom;
  return out;
}

}  // namespace relnav::rel
