#pragma once

#include <string>

#include "relnav/agent/rollout.hpp"
#include "relnav/env/shortest_path.hpp"
#include "relnav/numeric/rng.hpp"
#include "relnav/text/vocabulary.hpp"

namespace relnav::train {

// Draws an episode: a random start, a target node holding at least one
// object within [min_hops, max_hops] of the start, a target object at that
// node and a synthesized instruction. Falls back to any valid target when
// the hop window cannot be satisfied.
agent::EpisodeSpec sample_episode(const env::EnvironmentGraph& g,
                                  const env::AllPairsGeodesics& geo,
                                  const text::Vocabulary& vocab, int min_hops, int max_hops,
                                  numeric::Rng& rng);

// Episode file: {"start": n, "target_node": n, "target_object": c,
// "instruction_seed": s} or an explicit "tokens" array instead of the seed.
agent::EpisodeSpec load_episode_spec(const std::string& path, const env::EnvironmentGraph& g,
                                     const text::Vocabulary& vocab);
void save_episode_spec(const agent::EpisodeSpec& spec, std::uint64_t instruction_seed,
                       const std::string& path);

}  // namespace relnav::train
