#include "relnav/agent/rollout.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "relnav/common/error.hpp"
#include "relnav/loss/losses.hpp"
#include "relnav/loss/supervision.hpp"
#include "relnav/numeric/rng.hpp"

namespace relnav::agent {

using loss::kStopAction;
using numeric::Graph;
using numeric::ParamStore;
using numeric::Rng;
using numeric::Var;

RolloutMode rollout_mode_from_string(const std::string& s) {
  if (s == "teacher") return RolloutMode::kTeacher;
  if (s == "sample") return RolloutMode::kSample;
  if (s == "greedy") return RolloutMode::kGreedy;
  throw UsageError("unknown rollout mode: " + s + " (expected teacher|sample|greedy)");
}

std::string to_string(RolloutMode mode) {
  switch (mode) {
    case RolloutMode::kTeacher: return "teacher";
    case RolloutMode::kSample: return "sample";
    case RolloutMode::kGreedy: return "greedy";
  }
  return "?";
}

double EpisodeTrace::trajectory_length() const {
  double total = 0.0;
  for (const TraversedEdge& e : edges) total += e.length;
  return total;
}

double EpisodeTrace::reused_edge_length() const {
  double total = 0.0;
  std::vector<std::pair<int, int>> seen;
  for (const TraversedEdge& e : edges) {
    const auto key = std::minmax(e.u, e.v);
    if (std::find(seen.begin(), seen.end(), std::make_pair(key.first, key.second)) !=
        seen.end()) {
      total += e.length;
    } else {
      seen.emplace_back(key.first, key.second);
    }
  }
  return total;
}

std::string EpisodeTrace::to_json() const {
  nlohmann::json j;
  j["start"] = start;
  j["target_node"] = target_node;
  j["target_object"] = target_object;
  j["nodes"] = nodes;
  nlohmann::json edge_arr = nlohmann::json::array();
  for (const TraversedEdge& e : edges) edge_arr.push_back({e.u, e.v, e.length});
  j["edges"] = std::move(edge_arr);
  nlohmann::json step_arr = nlohmann::json::array();
  for (const StepRecord& s : steps) {
    step_arr.push_back({{"node", s.node},
                        {"candidates", s.candidates},
                        {"probabilities", s.probabilities},
                        {"stop_probability", s.stop_probability},
                        {"revisit", s.revisit},
                        {"expert_action", s.expert_action},
                        {"chosen", s.chosen},
                        {"tbp", s.tbp}});
  }
  j["steps"] = std::move(step_arr);
  j["final_node"] = final_node;
  j["predicted_object"] = predicted_object;
  j["forced_stop"] = forced_stop;
  return j.dump();
}

EpisodeTrace EpisodeTrace::from_json(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("trace: invalid JSON: ") + e.what());
  }
  EpisodeTrace t;
  t.start = j.at("start").get<int>();
  t.target_node = j.at("target_node").get<int>();
  t.target_object = j.at("target_object").get<int>();
  t.nodes = j.at("nodes").get<std::vector<int>>();
  for (const auto& ej : j.at("edges")) {
    t.edges.push_back({ej.at(0).get<int>(), ej.at(1).get<int>(), ej.at(2).get<double>()});
  }
  for (const auto& sj : j.at("steps")) {
    StepRecord s;
    s.node = sj.at("node").get<int>();
    s.candidates = sj.at("candidates").get<std::vector<int>>();
    s.probabilities = sj.at("probabilities").get<std::vector<double>>();
    s.stop_probability = sj.at("stop_probability").get<double>();
    s.revisit = sj.at("revisit").get<std::vector<double>>();
    s.expert_action = sj.at("expert_action").get<int>();
    s.chosen = sj.at("chosen").get<int>();
    s.tbp = sj.at("tbp").get<double>();
    t.steps.push_back(std::move(s));
  }
  t.final_node = j.at("final_node").get<int>();
  t.predicted_object = j.at("predicted_object").get<int>();
  t.forced_stop = j.at("forced_stop").get<bool>();
  return t;
}

namespace {

// Moves the agent along the known-map path to `destination`, appending
// every edge to the map history and the trace.
void walk_to(TopoMap& map, EpisodeTrace& trace, int destination) {
  const std::vector<int> path = map.known_path(map.current(), destination);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int prev = map.current();
    map.step_to(path[i]);
    trace.nodes.push_back(path[i]);
    trace.edges.push_back(map.history().back());
    (void)prev;
  }
}

std::size_t argmax_index(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace

std::vector<double> apply_revisit_penalty(std::vector<double> probabilities,
                                          const std::vector<double>& revisit, double xi) {
  if (xi == 1.0) return probabilities;
  if (revisit.size() != probabilities.size()) {
    throw ShapeError("apply_revisit_penalty: " + std::to_string(probabilities.size()) +
                     " probabilities vs " + std::to_string(revisit.size()) + " distances");
  }
  bool touched = false;
  for (std::size_t i = 0; i + 1 < probabilities.size(); ++i) {
    if (revisit[i] > 0.0) {
      probabilities[i] /= xi;
      touched = true;
    }
  }
  if (touched) {
    double total = 0.0;
    for (double p : probabilities) total += p;
    for (double& p : probabilities) p /= total;
  }
  return probabilities;
}

RolloutResult rollout(Graph& g, ParamStore& store, const env::EnvironmentGraph& world,
                      const env::AllPairsGeodesics& geo, const rel::RelationMatrix* relations,
                      const text::Vocabulary& vocab, const EpisodeSpec& episode,
                      const ModelConfig& model, const RolloutConfig& cfg) {
  if (cfg.max_steps < 1) throw ContractError("rollout: max_steps must be >= 1");
  if (cfg.xi < 0.25) throw ContractError("rollout: xi must be >= 0.25");
  if (!world.has_node(episode.start) || !world.has_node(episode.target_node)) {
    throw ContractError("rollout: episode endpoints out of range");
  }

  RolloutResult result;
  EpisodeTrace& trace = result.trace;
  trace.start = episode.start;
  trace.target_node = episode.target_node;
  trace.target_object = episode.target_object;
  trace.nodes.push_back(episode.start);

  // Instruction features are step-invariant; encode once per episode.
  text::NounExtraction nouns = text::extract_nouns(episode.instruction, vocab);
  if (nouns.empty()) {
    // Target-noun fallback keeps the encoders defined.
    nouns.categories = {episode.target_object};
    nouns.positions = {0};
  }
  Var noun_features = text::encode_nouns(g, store, nouns, model.text);
  Var instruction_vec = text::encode_instruction(g, store, episode.instruction, model.text);

  Rng sampler = Rng(cfg.sample_seed).fork("action-sampling");
  TopoMap map(world, episode.start);

  std::vector<Var> sap_terms;
  std::vector<Var> tbp_terms;
  bool stopped = false;

  for (int step = 0; step < cfg.max_steps && !stopped; ++step) {
    const env::ViewpointObservation obs = env::observe(world, map.current());
    map.apply_observation(obs);

    StepFeatures features =
        assemble_panoramic(g, store, obs, noun_features, nouns.categories, relations, model);
    ScoredCandidates scored = score_candidates(g, store, map, features, instruction_vec, model);
    const std::size_t num_candidates = scored.candidates.size();
    const std::size_t num_navigable = num_candidates - 1;

    StepRecord record;
    record.node = map.current();
    record.candidates = scored.candidates;
    record.expert_action = loss::demonstrator_action(map, geo, episode.target_node);
    record.revisit = loss::revisit_distances(map, scored.candidates);

    if (cfg.collect_loss) {
      const auto expert_it = std::find(scored.candidates.begin(), scored.candidates.end(),
                                       record.expert_action);
      sap_terms.push_back(loss::sap_step_loss(
          g, scored.probability_row,
          static_cast<std::size_t>(expert_it - scored.candidates.begin())));
      if (num_navigable > 0) {
        std::vector<std::size_t> nav_idx(num_navigable);
        for (std::size_t i = 0; i < num_navigable; ++i) nav_idx[i] = i;
        std::vector<double> nav_revisit(record.revisit.begin(),
                                        record.revisit.begin() +
                                            static_cast<std::ptrdiff_t>(num_navigable));
        Var step_tbp = loss::tbp_loss(g, g.gather_cols(scored.probability_row, nav_idx),
                                      nav_revisit);
        record.tbp = step_tbp.scalar();
        tbp_terms.push_back(step_tbp);
      }
    } else if (num_navigable > 0) {
      std::vector<double> nav_probs(num_navigable);
      for (std::size_t i = 0; i < num_navigable; ++i) {
        nav_probs[i] = scored.probability_row.value().at(0, i);
      }
      record.tbp = loss::tbp_value(
          nav_probs, {record.revisit.begin(),
                      record.revisit.begin() + static_cast<std::ptrdiff_t>(num_navigable)});
    }

    // Acting distribution: model probabilities, optionally replaced by the
    // uniform baseline, optionally reshaped by the inference penalty.
    std::vector<double> acting(num_candidates);
    if (cfg.random_policy) {
      std::fill(acting.begin(), acting.end(), 1.0 / static_cast<double>(num_candidates));
    } else {
      for (std::size_t i = 0; i < num_candidates; ++i) {
        acting[i] = scored.probability_row.value().at(0, i);
      }
    }
    if (!cfg.disable_inference_penalty) {
      acting = apply_revisit_penalty(std::move(acting), record.revisit, cfg.xi);
    }
    record.probabilities = acting;
    record.stop_probability = acting.back();

    // Action selection.
    int chosen = kStopAction;
    switch (cfg.mode) {
      case RolloutMode::kTeacher:
        chosen = record.expert_action;
        break;
      case RolloutMode::kGreedy:
        chosen = scored.candidates[argmax_index(acting)];
        break;
      case RolloutMode::kSample: {
        const double draw = sampler.uniform();
        double cum = 0.0;
        chosen = scored.candidates.back();
        for (std::size_t i = 0; i < num_candidates; ++i) {
          cum += acting[i];
          if (draw < cum) {
            chosen = scored.candidates[i];
            break;
          }
        }
        break;
      }
    }
    record.chosen = chosen;
    trace.steps.push_back(std::move(record));
    ++result.decisions;

    if (chosen == kStopAction) {
      stopped = true;
    } else {
      walk_to(map, trace, chosen);
    }
  }

  if (!stopped) {
    // Budget exhausted: back to the visited node that most wanted to stop.
    trace.forced_stop = true;
    int best_node = trace.steps.front().node;
    double best_prob = trace.steps.front().stop_probability;
    for (const StepRecord& s : trace.steps) {
      if (s.stop_probability > best_prob) {
        best_prob = s.stop_probability;
        best_node = s.node;
      }
    }
    walk_to(map, trace, best_node);
  }
  trace.final_node = map.current();

  // Object grounding at the final position.
  const env::ViewpointObservation final_obs = env::observe(world, trace.final_node);
  std::optional<std::size_t> target_index;
  if (!final_obs.objects.empty()) {
    Var logits = predict_object(g, store, final_obs, instruction_vec, model);
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.cols(); ++i) {
      if (logits.value().at(0, i) > logits.value().at(0, best)) best = i;
    }
    trace.predicted_object = final_obs.objects[best].category;
    for (std::size_t i = 0; i < final_obs.objects.size(); ++i) {
      if (final_obs.objects[i].category == episode.target_object) {
        target_index = i;
        break;
      }
    }
    if (cfg.collect_loss) result.og = loss::og_loss(g, logits, target_index);
  } else {
    trace.predicted_object = -1;  // grounding miss, recorded rather than thrown
    if (cfg.collect_loss) result.og = loss::og_loss(g, Var{}, std::nullopt);
  }

  if (cfg.collect_loss) {
    Var sap = g.constant_scalar(0.0);
    for (const Var& term : sap_terms) sap = g.add(sap, term);
    result.sap = sap;
    Var tbp = g.constant_scalar(0.0);
    for (const Var& term : tbp_terms) tbp = g.add(tbp, term);
    result.tbp = tbp;
  }
  return result;
}

}  // namespace relnav::agent
