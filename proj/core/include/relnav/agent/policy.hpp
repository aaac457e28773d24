#pragma once

#include <array>
#include <optional>
#include <vector>

#include "relnav/agent/topo_map.hpp"
#include "relnav/env/environment.hpp"
#include "relnav/numeric/graph.hpp"
#include "relnav/rel/fusion.hpp"
#include "relnav/rel/relation_matrix.hpp"
#include "relnav/rel/tor.hpp"
#include "relnav/text/encoders.hpp"

namespace relnav::agent {

// Everything needed to build the model's parameters and run a step.
struct ModelConfig {
  text::TextEncoderConfig text;  // d_model, max_len
  int d_view = 20;
  int d_obj = 16;
  int n_views = 12;
  bool tor_softmax = true;            // normalize cross-attention scores
  rel::FusionMask fusion;             // ablation toggles for the fused branches
  std::array<double, 3> alpha_init{0.8, 0.1, 0.1};

  rel::TorConfig tor() const {
    return rel::TorConfig{d_obj, text.d_model, tor_softmax};
  }
  static ModelConfig for_environment(const env::EnvConfig& e);
};

// Registers the full parameter set: text encoders, object projection,
// fusion logits, view projection, status embeddings, candidate/stop scoring
// MLPs and the object grounding head.
void init_model_params(numeric::ParamStore& store, const text::Vocabulary& vocab,
                       const ModelConfig& cfg, numeric::Rng& rng);

// Per-step assembled features.
struct StepFeatures {
  numeric::Var panoramic;          // F_t = [R_t ; Q_t], (n + m) x d_model
  numeric::Var fused;              // Q_t, m x d_model (undefined when m == 0)
  numeric::Var object_projection;  // FC(O_t), m x d_model (undefined when m == 0)
  numeric::Var temporal_attention; // T, m x noun_count (undefined unless temporal on)
};

// Builds F_t for the current observation: projected views concatenated with
// the fused object feature Q_t (raw projection + temporal + spatial
// branches under the fusion mask).
StepFeatures assemble_panoramic(numeric::Graph& g, numeric::ParamStore& store,
                                const env::ViewpointObservation& obs,
                                numeric::Var noun_features,
                                const std::vector<int>& noun_categories,
                                const rel::RelationMatrix* relations, const ModelConfig& cfg);

struct ScoredCandidates {
  std::vector<int> candidates;   // frontier nodes ascending, then kStopAction
  numeric::Var logits;           // 1 x (r + 1); undefined when the frontier is empty
  numeric::Var probability_row;  // 1 x (r + 1), sums to 1
};

// Scores every frontier node plus STOP: each candidate embedding is matched
// against the instruction vector and cross-attends into F_t, a small MLP
// turns that into a logit, and a softmax produces the distribution. An
// empty frontier yields {STOP: 1.0}.
ScoredCandidates score_candidates(numeric::Graph& g, numeric::ParamStore& store,
                                  const TopoMap& map, const StepFeatures& features,
                                  numeric::Var instruction_vec, const ModelConfig& cfg);

// Logits over the objects present in the observation (1 x m). The grounded
// object is the argmax, ties toward the lowest index.
numeric::Var predict_object(numeric::Graph& g, numeric::ParamStore& store,
                            const env::ViewpointObservation& obs,
                            numeric::Var instruction_vec, const ModelConfig& cfg);

}  // namespace relnav::agent
