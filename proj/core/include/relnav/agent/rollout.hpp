#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relnav/agent/policy.hpp"
#include "relnav/agent/topo_map.hpp"
#include "relnav/env/shortest_path.hpp"
#include "relnav/text/instruction.hpp"

namespace relnav::agent {

enum class RolloutMode { kTeacher, kSample, kGreedy };

RolloutMode rollout_mode_from_string(const std::string& s);
std::string to_string(RolloutMode mode);

struct EpisodeSpec {
  int start = -1;
  int target_node = -1;
  int target_object = -1;
  text::Instruction instruction;
};

struct StepRecord {
  int node = -1;
  std::vector<int> candidates;         // frontier ascending, then kStopAction
  std::vector<double> probabilities;   // acting distribution (after any penalty)
  double stop_probability = 0.0;
  std::vector<double> revisit;         // aligned with candidates
  int expert_action = -1;
  int chosen = -1;
  double tbp = 0.0;  // step turning-back penalty over the navigable candidates
};

struct EpisodeTrace {
  int start = -1;
  int target_node = -1;
  int target_object = -1;
  std::vector<int> nodes;               // every node passed through, in order
  std::vector<TraversedEdge> edges;     // aligned: edges[i] joins nodes[i], nodes[i+1]
  std::vector<StepRecord> steps;        // one per decision
  int final_node = -1;
  int predicted_object = -1;            // -1 on grounding miss
  bool forced_stop = false;

  double trajectory_length() const;
  // Total length of edge crossings that reuse an already-traversed edge.
  double reused_edge_length() const;

  std::string to_json() const;  // single line, JSONL-friendly
  static EpisodeTrace from_json(const std::string& line);
};

struct RolloutConfig {
  RolloutMode mode = RolloutMode::kGreedy;
  int max_steps = 15;
  // Inference-time revisit penalty divisor: candidates whose known-map path
  // reuses a traversed edge have their probability divided by xi, then the
  // distribution is renormalized. xi == 1 disables the penalty entirely
  // (bit-identical to the penalty-free path). Must be >= 0.25.
  double xi = 1.0;
  // Skips the penalty application unconditionally; together with any xi this
  // is the reference "penalty-free" code path.
  bool disable_inference_penalty = false;
  bool collect_loss = true;
  std::uint64_t sample_seed = 0;
  bool random_policy = false;  // uniform action distribution (baseline)
};

struct RolloutResult {
  EpisodeTrace trace;
  numeric::Var sap;  // defined when collect_loss
  numeric::Var og;
  numeric::Var tbp;
  int decisions = 0;
};

// Divides the probability of every candidate with a positive revisit
// distance by xi and renormalizes. xi == 1 returns the input unchanged.
// The last entry is the stop probability and is never penalized directly.
std::vector<double> apply_revisit_penalty(std::vector<double> probabilities,
                                          const std::vector<double>& revisit, double xi);

// Runs one episode. Teacher mode follows the pseudo-interactive
// demonstrator while recording the model's distributions; sample and greedy
// follow the model. Movement to a non-adjacent frontier node traverses the
// known-map shortest path, appending every intermediate edge. When the step
// budget runs out the final position is the visited node with the maximum
// recorded stop probability (earliest visit on ties) and the trace walks
// there so it stays replayable.
RolloutResult rollout(numeric::Graph& g, numeric::ParamStore& store,
                      const env::EnvironmentGraph& world, const env::AllPairsGeodesics& geo,
                      const rel::RelationMatrix* relations, const text::Vocabulary& vocab,
                      const EpisodeSpec& episode, const ModelConfig& model,
                      const RolloutConfig& cfg);

}  // namespace relnav::agent
