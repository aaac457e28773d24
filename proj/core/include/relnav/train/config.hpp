#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "relnav/agent/policy.hpp"
#include "relnav/env/environment.hpp"
#include "relnav/loss/losses.hpp"
#include "relnav/rel/relation_matrix.hpp"

namespace relnav::train {

// One declarative file drives an entire experiment; see from_json for the
// schema. All randomness descends from `seed`.
struct TrainConfig {
  std::uint64_t seed = 7;

  // Environment splits. Validation-seen episodes are drawn on the training
  // environments with a held-out episode stream; validation-unseen
  // environments are generated from an independent seed stream.
  int train_envs = 20;
  int unseen_envs = 5;
  env::EnvConfig env;

  // Model.
  int d_model = 32;
  int max_len = 24;
  bool tor_softmax = true;
  std::array<double, 3> alpha_init{0.8, 0.1, 0.1};

  // Spatial relation constants.
  rel::RelationConstants relation_constants;

  // Loss weights.
  loss::LossWeights lambdas;

  // Optimizer and schedule.
  double lr = 0.05;
  double momentum = 0.0;
  int iterations = 3000;
  double teacher_warmup = 0.3;  // fraction of iterations forced to teacher mode
  double sample_ratio = 0.5;    // probability of a sampled rollout after warmup

  // Rollouts and episodes.
  int max_steps = 15;
  double xi = 1.0;
  int min_hops = 2;
  int max_hops = 5;
  int eval_episodes_per_env = 20;
  int eval_every = 0;  // 0 disables periodic validation snapshots

  // Ablation toggles. Disabled modules contribute exactly zero.
  bool temporal_relations = true;
  bool spatial_relations = true;
  bool turning_back_penalty = true;

  agent::ModelConfig model_config() const;
  loss::LossWeights effective_lambdas() const;

  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
  void save(const std::string& path) const;
  static TrainConfig load(const std::string& path);
};

}  // namespace relnav::train
