#include "relnav/rel/tor.hpp"

#include <cmath>

#include "relnav/common/error.hpp"

namespace relnav::rel {

using numeric::Graph;
using numeric::ParamStore;
using numeric::Rng;
using numeric::Var;

void init_tor_params(ParamStore& store, const TorConfig& cfg, Rng& rng) {
  store.create_normal("rel.fc_w", static_cast<std::size_t>(cfg.d_obj),
                      static_cast<std::size_t>(cfg.d_model), rng,
                      1.0 / std::sqrt(static_cast<double>(cfg.d_obj)));
  store.create_zeros("rel.fc_b", 1, static_cast<std::size_t>(cfg.d_model));
}

TorOutput tor_forward(Graph& g, ParamStore& store, const numeric::Tensor2& objects,
                      Var noun_features, const TorConfig& cfg) {
  if (objects.rows() == 0) throw ContractError("tor_forward: at least one object is required");
  if (objects.cols() != static_cast<std::size_t>(cfg.d_obj)) {
    throw ShapeError("tor_forward: objects are " + objects.shape_str() + ", expected cols " +
                     std::to_string(cfg.d_obj));
  }
  if (noun_features.cols() != static_cast<std::size_t>(cfg.d_model)) {
    throw ShapeError("tor_forward: noun features are " + noun_features.value().shape_str() +
                     ", expected cols " + std::to_string(cfg.d_model));
  }
  TorOutput out;
  out.object_projection = g.affine(g.constant(objects), g.param(store, "rel.fc_w"),
                                   g.param(store, "rel.fc_b"));
  Var scores = g.matmul_nt(out.object_projection, noun_features);
  out.attention = cfg.normalize_scores ? g.row_softmax(scores) : scores;
  out.features = g.matmul(out.attention, noun_features);
  return out;
}

}  // namespace relnav::rel
