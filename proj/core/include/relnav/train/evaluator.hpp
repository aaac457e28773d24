#pragma once

#include <cstdint>
#include <vector>

#include "relnav/train/config.hpp"
#include "relnav/train/metrics.hpp"

namespace relnav::train {

struct EvalOptions {
  std::uint64_t episode_seed = 58113;  // base stream for episode sampling
  int episodes_per_env = 20;
  int max_steps = 15;
  double xi = 1.0;
  bool disable_inference_penalty = false;
  int min_hops = 2;
  int max_hops = 5;
  bool random_policy = false;  // uniform-action baseline
  agent::RolloutMode mode = agent::RolloutMode::kGreedy;
};

// Greedy (or configured-mode) rollouts over every environment in the split;
// episodes are a pure function of (episode_seed, environment index, episode
// index), so paired comparisons across policies see identical episodes.
MetricsReport evaluate(numeric::ParamStore& params,
                       const std::vector<env::EnvironmentGraph>& split,
                       const rel::RelationMatrix* relations, const text::Vocabulary& vocab,
                       const agent::ModelConfig& model, const EvalOptions& options,
                       std::vector<agent::EpisodeTrace>* traces_out = nullptr);

}  // namespace relnav::train
