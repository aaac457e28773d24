#include "relnav/train/evaluator.hpp"

#include "relnav/env/shortest_path.hpp"
#include "relnav/train/episodes.hpp"

namespace relnav::train {

using numeric::Rng;

MetricsReport evaluate(numeric::ParamStore& params,
                       const std::vector<env::EnvironmentGraph>& split,
                       const rel::RelationMatrix* relations, const text::Vocabulary& vocab,
                       const agent::ModelConfig& model, const EvalOptions& options,
                       std::vector<agent::EpisodeTrace>* traces_out) {
  std::vector<agent::EpisodeTrace> traces;
  std::vector<const env::EnvironmentGraph*> worlds;

  for (std::size_t env_idx = 0; env_idx < split.size(); ++env_idx) {
    const env::EnvironmentGraph& world = split[env_idx];
    const env::AllPairsGeodesics geo(world);
    for (int ep = 0; ep < options.episodes_per_env; ++ep) {
      Rng rng = Rng(options.episode_seed)
                    .fork("episode")
                    .fork(static_cast<std::uint64_t>(env_idx))
                    .fork(static_cast<std::uint64_t>(ep));
      const agent::EpisodeSpec spec =
          sample_episode(world, geo, vocab, options.min_hops, options.max_hops, rng);

      agent::RolloutConfig rc;
      rc.mode = options.mode;
      rc.max_steps = options.max_steps;
      rc.xi = options.xi;
      rc.disable_inference_penalty = options.disable_inference_penalty;
      rc.collect_loss = false;
      rc.random_policy = options.random_policy;
      rc.sample_seed = rng.next_u64();

      numeric::Graph g;
      auto result = agent::rollout(g, params, world, geo, relations, vocab, spec, model, rc);
      traces.push_back(std::move(result.trace));
      worlds.push_back(&world);
    }
  }
  MetricsReport report = compute_metrics(traces, worlds);
  if (traces_out) *traces_out = std::move(traces);
  return report;
}

}  // namespace relnav::train
