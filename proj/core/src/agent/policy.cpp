#include "relnav/agent/policy.hpp"

#include <cmath>

#include "relnav/common/error.hpp"

namespace relnav::agent {

using numeric::Graph;
using numeric::ParamStore;
using numeric::Rng;
using numeric::Tensor2;
using numeric::Var;

ModelConfig ModelConfig::for_environment(const env::EnvConfig& e) {
  ModelConfig cfg;
  cfg.d_view = e.obs.d_view;
  cfg.d_obj = e.obs.d_obj;
  cfg.n_views = e.obs.n_views;
  return cfg;
}

void init_model_params(ParamStore& store, const text::Vocabulary& vocab, const ModelConfig& cfg,
                       Rng& rng) {
  const auto d = static_cast<std::size_t>(cfg.text.d_model);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.text.d_model));

  text::init_text_params(store, vocab, cfg.text, rng);
  rel::init_tor_params(store, cfg.tor(), rng);
  rel::init_fusion_params(store, cfg.alpha_init);

  store.create_normal("policy.view_w", static_cast<std::size_t>(cfg.d_view), d, rng,
                      1.0 / std::sqrt(static_cast<double>(cfg.d_view)));
  store.create_zeros("policy.view_b", 1, d);
  store.create_normal("policy.status_embed", 2, d, rng, 0.1);
  store.create_normal("policy.score_w1", 2 * d, d, rng, scale);
  store.create_zeros("policy.score_b1", 1, d);
  store.create_normal("policy.score_w2", d, 1, rng, scale);
  store.create_zeros("policy.score_b2", 1, 1);
  store.create_normal("policy.stop_w1", d, d, rng, scale);
  store.create_zeros("policy.stop_b1", 1, d);
  store.create_normal("policy.stop_w2", d, 1, rng, scale);
  store.create_zeros("policy.stop_b2", 1, 1);
  store.create_normal("og.w", static_cast<std::size_t>(cfg.d_obj), d, rng,
                      1.0 / std::sqrt(static_cast<double>(cfg.d_obj)));
  store.create_zeros("og.b", 1, d);
}

StepFeatures assemble_panoramic(Graph& g, ParamStore& store, const env::ViewpointObservation& obs,
                                Var noun_features, const std::vector<int>& noun_categories,
                                const rel::RelationMatrix* relations, const ModelConfig& cfg) {
  StepFeatures out;
  Var views = g.affine(g.constant(obs.views), g.param(store, "policy.view_w"),
                       g.param(store, "policy.view_b"));
  if (obs.objects.empty()) {
    out.panoramic = views;
    return out;
  }

  auto tor = rel::tor_forward(g, store, obs.object_features, noun_features, cfg.tor());
  out.object_projection = tor.object_projection;

  Var temporal, spatial;
  if (cfg.fusion.temporal) {
    temporal = tor.features;
    out.temporal_attention = tor.attention;
  }
  if (cfg.fusion.spatial) {
    if (relations == nullptr) {
      throw ContractError("assemble_panoramic: spatial branch enabled without a relation matrix");
    }
    std::vector<int> object_categories;
    object_categories.reserve(obs.objects.size());
    for (const auto& o : obs.objects) object_categories.push_back(o.category);
    spatial = rel::spatial_features(g, relations->query(object_categories, noun_categories),
                                    noun_features);
  }
  out.fused = rel::fuse(g, store, tor.object_projection, temporal, spatial, cfg.fusion);
  out.panoramic = g.concat_rows(views, out.fused);
  return out;
}

namespace {

// Candidate embedding: projected raw view accumulator plus a visit-status
// embedding (row 0 = visited/current, row 1 = frontier).
Var node_embedding(Graph& g, ParamStore& store, const TopoMap& map, int node, bool is_frontier) {
  Var raw = g.constant(map.node_embedding_raw(node));
  Var projected = g.affine(raw, g.param(store, "policy.view_w"), g.param(store, "policy.view_b"));
  const std::size_t status_row = is_frontier ? 1 : 0;
  return g.add(projected, g.gather_rows(g.param(store, "policy.status_embed"), {status_row}));
}

Var cross_attend(Graph& g, Var query, Var memory, int d_model) {
  Var scores = g.scale(g.matmul_nt(query, memory), 1.0 / std::sqrt(double(d_model)));
  return g.matmul(g.row_softmax(scores), memory);
}

}  // namespace

ScoredCandidates score_candidates(Graph& g, ParamStore& store, const TopoMap& map,
                                  const StepFeatures& features, Var instruction_vec,
                                  const ModelConfig& cfg) {
  ScoredCandidates out;
  out.candidates = map.frontier();
  out.candidates.push_back(-1);  // loss::kStopAction
  if (map.frontier().empty()) {
    out.probability_row = g.constant(Tensor2::from_rows({{1.0}}));
    return out;
  }

  std::vector<Var> logits;
  logits.reserve(out.candidates.size());
  for (int f : map.frontier()) {
    Var e = node_embedding(g, store, map, f, true);
    Var ctx = cross_attend(g, e, features.panoramic, cfg.text.d_model);
    Var h = g.concat_cols(g.mul(e, instruction_vec), ctx);
    Var hidden = g.tanh_all(
        g.affine(h, g.param(store, "policy.score_w1"), g.param(store, "policy.score_b1")));
    logits.push_back(
        g.affine(hidden, g.param(store, "policy.score_w2"), g.param(store, "policy.score_b2")));
  }
  Var e_cur = node_embedding(g, store, map, map.current(), false);
  Var stop_hidden = g.tanh_all(g.affine(g.mul(e_cur, instruction_vec),
                                        g.param(store, "policy.stop_w1"),
                                        g.param(store, "policy.stop_b1")));
  logits.push_back(g.affine(stop_hidden, g.param(store, "policy.stop_w2"),
                            g.param(store, "policy.stop_b2")));

  out.logits = g.concat_cols_list(logits);
  out.probability_row = g.row_softmax(out.logits);
  return out;
}

Var predict_object(Graph& g, ParamStore& store, const env::ViewpointObservation& obs,
                   Var instruction_vec, const ModelConfig& cfg) {
  (void)cfg;
  if (obs.objects.empty()) {
    throw ContractError("predict_object: no objects at the node");
  }
  Var proj = g.affine(g.constant(obs.object_features), g.param(store, "og.w"),
                      g.param(store, "og.b"));
  return g.transpose(g.matmul_nt(proj, instruction_vec));
}

}  // namespace relnav::agent
