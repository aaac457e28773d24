#include "relnav/train/episodes.hpp"

#include <fstream>

#include <json.hpp>

#include "relnav/common/error.hpp"
#include "relnav/text/instruction.hpp"

namespace relnav::train {

using numeric::Rng;

agent::EpisodeSpec sample_episode(const env::EnvironmentGraph& g,
                                  const env::AllPairsGeodesics& geo,
                                  const text::Vocabulary& vocab, int min_hops, int max_hops,
                                  Rng& rng) {
  (void)geo;
  const int n = g.node_count();
  agent::EpisodeSpec spec;
  spec.start = static_cast<int>(rng.index(static_cast<std::size_t>(n)));

  auto hops_between = [&](int a, int b) {
    return static_cast<int>(env::shortest_path(g, a, b).nodes.size()) - 1;
  };

  int target = -1;
  for (int attempt = 0; attempt < 200 && target < 0; ++attempt) {
    const int candidate = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    if (candidate == spec.start || g.objects_at(candidate).empty()) continue;
    const int hops = hops_between(spec.start, candidate);
    if (hops >= min_hops && hops <= max_hops) target = candidate;
  }
  if (target < 0) {
    // Hop window unsatisfiable from this start; accept any object-bearing node.
    for (int attempt = 0; attempt < 200 && target < 0; ++attempt) {
      const int candidate = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
      if (candidate != spec.start && !g.objects_at(candidate).empty()) target = candidate;
    }
  }
  if (target < 0) {
    throw ContractError("sample_episode: no target node with objects reachable from start");
  }

  spec.target_node = target;
  const auto& objs = g.objects_at(target);
  spec.target_object = objs[rng.index(objs.size())].category;
  spec.instruction = text::synthesize_instruction(g, spec.start, spec.target_node,
                                                  spec.target_object, vocab, rng.next_u64());
  return spec;
}

agent::EpisodeSpec load_episode_spec(const std::string& path, const env::EnvironmentGraph& g,
                                     const text::Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("load_episode_spec: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("episode spec: invalid JSON: ") + e.what());
  }
  agent::EpisodeSpec spec;
  spec.start = j.at("start").get<int>();
  spec.target_node = j.at("target_node").get<int>();
  spec.target_object = j.at("target_object").get<int>();
  if (!g.has_node(spec.start) || !g.has_node(spec.target_node)) {
    throw IoError("episode spec: node out of range for this environment");
  }
  if (j.contains("tokens")) {
    spec.instruction.tokens = j.at("tokens").get<std::vector<int>>();
    spec.instruction.target_node = spec.target_node;
    spec.instruction.target_object = spec.target_object;
    if (spec.instruction.tokens.empty()) throw IoError("episode spec: empty token list");
  } else {
    spec.instruction = text::synthesize_instruction(
        g, spec.start, spec.target_node, spec.target_object, vocab,
        j.value("instruction_seed", std::uint64_t{0}));
  }
  return spec;
}

void save_episode_spec(const agent::EpisodeSpec& spec, std::uint64_t instruction_seed,
                       const std::string& path) {
  nlohmann::json j;
  j["start"] = spec.start;
  j["target_node"] = spec.target_node;
  j["target_object"] = spec.target_object;
  j["instruction_seed"] = instruction_seed;
  std::ofstream out(path);
  if (!out) throw IoError("save_episode_spec: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace relnav::train
