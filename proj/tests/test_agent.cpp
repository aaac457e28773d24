#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "relnav/agent/policy.hpp"
#include "relnav/agent/rollout.hpp"
#include "relnav/agent/topo_map.hpp"
#include "relnav/common/error.hpp"
#include "relnav/env/shortest_path.hpp"
#include "relnav/loss/supervision.hpp"
#include "relnav/numeric/grad_check.hpp"
#include "relnav/text/instruction.hpp"

using namespace relnav;
using agent::EpisodeSpec;
using agent::ModelConfig;
using agent::RolloutConfig;
using agent::RolloutMode;
using agent::TopoMap;
using loss::kStopAction;
using numeric::Graph;
using numeric::ParamStore;
using numeric::Rng;
using numeric::Tensor2;
using numeric::Var;

namespace {

env::EnvConfig small_env_config() {
  env::EnvConfig cfg;
  cfg.node_count = 12;
  cfg.degree = 3;
  cfg.vocab_size = 8;
  cfg.objects_per_node = 2;
  cfg.obs.n_views = 8;
  cfg.obs.d_view = 10;
  cfg.obs.d_obj = 8;
  return cfg;
}

struct World {
  env::EnvironmentGraph graph;
  env::AllPairsGeodesics geo;
  text::Vocabulary vocab;
  ModelConfig model;
  ParamStore params;

  explicit World(std::uint64_t seed, env::EnvConfig cfg = small_env_config())
      : graph(env::generate_environment(seed, cfg)),
        geo(graph),
        vocab(text::Vocabulary::build(cfg.vocab_size)),
        model(ModelConfig::for_environment(cfg)) {
    model.text.d_model = 12;
    Rng rng(seed + 999);
    agent::init_model_params(params, vocab, model, rng);
  }

  EpisodeSpec episode(int start, int target, std::uint64_t seed = 13) {
    EpisodeSpec spec;
    spec.start = start;
    spec.target_node = target;
    spec.target_object = graph.objects_at(target).front().category;
    spec.instruction = text::synthesize_instruction(graph, start, target, spec.target_object,
                                                    vocab, seed);
    return spec;
  }

  int any_target(int start, Rng& rng) {
    while (true) {
      const int t = static_cast<int>(rng.index(static_cast<std::size_t>(graph.node_count())));
      if (t != start && !graph.objects_at(t).empty()) return t;
    }
  }
};

}  // namespace

TEST_CASE("topo map: first observation yields start visited and neighbors as frontier") {
  World w(3);
  const int start = 0;
  TopoMap map(w.graph, start);
  map.apply_observation(env::observe(w.graph, start));
  CHECK(map.visited(start));
  CHECK(map.visited_count() == 1);
  std::vector<int> expect;
  for (const auto& [nb, len] : w.graph.neighbors(start)) expect.push_back(nb);
  std::sort(expect.begin(), expect.end());
  CHECK(map.frontier() == expect);
}

TEST_CASE("topo map: revisiting keeps the visited set unchanged") {
  World w(4);
  TopoMap map(w.graph, 0);
  map.apply_observation(env::observe(w.graph, 0));
  const int neighbor = map.frontier().front();
  map.step_to(neighbor);
  map.apply_observation(env::observe(w.graph, neighbor));
  const int count = map.visited_count();
  map.step_to(0);
  map.apply_observation(env::observe(w.graph, 0));  // revisit
  CHECK(map.visited_count() == count);
  CHECK(map.visited(0));
  CHECK(map.history().size() == 2);
}

TEST_CASE("topo map: after visiting every node the frontier is empty") {
  // 5-node sweep; follow the frontier until exhausted.
  env::EnvConfig cfg = small_env_config();
  cfg.node_count = 5;
  cfg.degree = 2;
  World w(5, cfg);
  TopoMap map(w.graph, 0);
  map.apply_observation(env::observe(w.graph, 0));
  int guard = 0;
  while (!map.frontier().empty() && guard++ < 32) {
    const int next = map.frontier().front();
    const auto path = map.known_path(map.current(), next);
    for (std::size_t i = 1; i < path.size(); ++i) map.step_to(path[i]);
    map.apply_observation(env::observe(w.graph, map.current()));
  }
  CHECK(map.visited_count() == 5);
  CHECK(map.frontier().empty());
  // The observation-mismatch contract.
  CHECK_THROWS_AS(map.apply_observation(env::observe(w.graph, (map.current() + 1) % 5)),
                  ContractError);
}

TEST_CASE("assemble_panoramic: row counts add up and the no-object case degenerates") {
  World w(6);
  Graph g;
  text::NounExtraction nouns;
  nouns.categories = {1, 3};
  nouns.positions = {0, 2};
  Var noun_features = text::encode_nouns(g, w.params, nouns, w.model.text);

  const auto obs = env::observe(w.graph, 0);
  REQUIRE(!obs.objects.empty());
  auto features = agent::assemble_panoramic(g, w.params, obs, noun_features, nouns.categories,
                                            nullptr, [&] {
                                              ModelConfig m = w.model;
                                              m.fusion.spatial = false;
                                              return m;
                                            }());
  CHECK(features.panoramic.rows() ==
        static_cast<std::size_t>(w.model.n_views) + obs.objects.size());
  CHECK(features.panoramic.cols() == static_cast<std::size_t>(w.model.text.d_model));

  // Zero-object observation: the panoramic feature is the projected views.
  env::ViewpointObservation empty_obs = obs;
  empty_obs.objects.clear();
  empty_obs.object_features = Tensor2(0, static_cast<std::size_t>(w.model.d_obj));
  auto only_views = agent::assemble_panoramic(g, w.params, empty_obs, noun_features,
                                              nouns.categories, nullptr, w.model);
  CHECK(only_views.panoramic.rows() == static_cast<std::size_t>(w.model.n_views));
  CHECK(!only_views.fused.defined());
}

TEST_CASE("assemble_panoramic requires a relation matrix when the spatial branch is on") {
  World w(6);
  Graph g;
  text::NounExtraction nouns;
  nouns.categories = {1};
  nouns.positions = {0};
  Var noun_features = text::encode_nouns(g, w.params, nouns, w.model.text);
  const auto obs = env::observe(w.graph, 0);
  CHECK_THROWS_AS(agent::assemble_panoramic(g, w.params, obs, noun_features, nouns.categories,
                                            nullptr, w.model),
                  ContractError);
}

TEST_CASE("score_candidates: empty frontier forces STOP with probability 1") {
  World w(7);
  // Visit everything so the frontier drains.
  TopoMap map(w.graph, 0);
  map.apply_observation(env::observe(w.graph, 0));
  int guard = 0;
  while (!map.frontier().empty() && guard++ < 64) {
    const int next = map.frontier().front();
    const auto path = map.known_path(map.current(), next);
    for (std::size_t i = 1; i < path.size(); ++i) map.step_to(path[i]);
    map.apply_observation(env::observe(w.graph, map.current()));
  }
  REQUIRE(map.frontier().empty());

  Graph g;
  text::NounExtraction nouns;
  nouns.categories = {2};
  nouns.positions = {0};
  Var noun_features = text::encode_nouns(g, w.params, nouns, w.model.text);
  Var u = g.constant(Tensor2(1, static_cast<std::size_t>(w.model.text.d_model), 0.1));
  ModelConfig m = w.model;
  m.fusion.spatial = false;
  auto features = agent::assemble_panoramic(g, w.params, env::observe(w.graph, map.current()),
                                            noun_features, nouns.categories, nullptr, m);
  auto scored = agent::score_candidates(g, w.params, map, features, u, m);
  CHECK(scored.candidates == std::vector<int>{kStopAction});
  CHECK(scored.probability_row.value().at(0, 0) == 1.0);
}

TEST_CASE("score_candidates: identical frontier embeddings get identical probabilities") {
  // Hand-built symmetric world; observations are crafted so both frontier
  // nodes accumulate the same toward-view.
  const std::string json = R"({
    "schema_version": 1, "seed": 1,
    "config": {"node_count": 3, "degree": 1, "vocab_size": 4, "objects_per_node": 1,
               "world_size": 0.0, "n_views": 4, "d_view": 8, "d_obj": 6},
    "nodes": [{"id": 0, "x": -2.0, "y": 0.0, "z": 0.0},
              {"id": 1, "x": 0.0, "y": 0.0, "z": 0.0},
              {"id": 2, "x": 2.0, "y": 0.0, "z": 0.0}],
    "edges": [{"u": 0, "v": 1, "length": 2.0}, {"u": 1, "v": 2, "length": 2.0}],
    "objects": [{"node": 1, "category": 0, "direction": [1.0, 0.0, 0.0], "depth": 1.0}]
  })";
  auto world = env::EnvironmentGraph::from_json(json);
  ModelConfig model = ModelConfig::for_environment(world.config());
  model.text.d_model = 8;
  model.fusion.spatial = false;
  ParamStore params;
  Rng rng(2);
  text::Vocabulary vocab = text::Vocabulary::build(4);
  agent::init_model_params(params, vocab, model, rng);

  TopoMap map(world, 1);
  env::ViewpointObservation obs = env::observe(world, 1);
  obs.views.fill(0.25);  // identical rows -> identical toward-views for 0 and 2
  map.apply_observation(obs);
  REQUIRE(map.frontier() == std::vector<int>{0, 2});

  Graph g;
  text::NounExtraction nouns;
  nouns.categories = {0};
  nouns.positions = {0};
  Var noun_features = text::encode_nouns(g, params, nouns, model.text);
  Var u = text::encode_instruction(g, params, [] {
    text::Instruction i;
    i.tokens = {0, 5};
    return i;
  }(), model.text);
  auto features = agent::assemble_panoramic(g, params, obs, noun_features, nouns.categories,
                                            nullptr, model);
  auto scored = agent::score_candidates(g, params, map, features, u, model);
  REQUIRE(scored.candidates.size() == 3);
  CHECK(scored.probability_row.value().at(0, 0) ==
        doctest::Approx(scored.probability_row.value().at(0, 1)).epsilon(1e-12));
}

TEST_CASE("score_candidates probabilities sum to 1 and match a softmax oracle") {
  World w(8);
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    TopoMap map(w.graph, static_cast<int>(rng.index(12)));
    map.apply_observation(env::observe(w.graph, map.current()));

    Graph g;
    text::NounExtraction nouns;
    nouns.categories = {static_cast<int>(rng.index(8))};
    nouns.positions = {0};
    Var noun_features = text::encode_nouns(g, w.params, nouns, w.model.text);
    Var u = g.constant(Tensor2(1, static_cast<std::size_t>(w.model.text.d_model), 0.05));
    ModelConfig m = w.model;
    m.fusion.spatial = false;
    auto features = agent::assemble_panoramic(
        g, w.params, env::observe(w.graph, map.current()), noun_features, nouns.categories,
        nullptr, m);
    auto scored = agent::score_candidates(g, w.params, map, features, u, m);

    double total = 0.0;
    for (std::size_t i = 0; i < scored.probability_row.cols(); ++i) {
      total += scored.probability_row.value().at(0, i);
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);

    // Independent softmax over the returned logits.
    REQUIRE(scored.logits.defined());
    double mx = scored.logits.value().at(0, 0);
    for (std::size_t i = 1; i < scored.logits.cols(); ++i) {
      mx = std::max(mx, scored.logits.value().at(0, i));
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < scored.logits.cols(); ++i) {
      denom += std::exp(scored.logits.value().at(0, i) - mx);
    }
    for (std::size_t i = 0; i < scored.logits.cols(); ++i) {
      const double expect = std::exp(scored.logits.value().at(0, i) - mx) / denom;
      CHECK(scored.probability_row.value().at(0, i) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("predict_object: single object wins, duplicates break ties toward index 0") {
  World w(9);
  Graph g;
  Var u = g.constant(Tensor2(1, static_cast<std::size_t>(w.model.text.d_model), 0.3));

  env::ViewpointObservation obs = env::observe(w.graph, 0);
  REQUIRE(!obs.objects.empty());
  env::ViewpointObservation one = obs;
  one.objects.resize(1);
  one.object_features = Tensor2(1, static_cast<std::size_t>(w.model.d_obj));
  for (std::size_t j = 0; j < one.object_features.cols(); ++j) {
    one.object_features.at(0, j) = obs.object_features.at(0, j);
  }
  Var logits = agent::predict_object(g, w.params, one, u, w.model);
  CHECK(logits.cols() == 1);

  // Duplicate rows tie exactly; argmax must stay at the lowest index.
  env::ViewpointObservation dup = one;
  dup.objects.push_back(dup.objects.front());
  dup.object_features = Tensor2(2, one.object_features.cols());
  for (std::size_t j = 0; j < one.object_features.cols(); ++j) {
    dup.object_features.at(0, j) = one.object_features.at(0, j);
    dup.object_features.at(1, j) = one.object_features.at(0, j);
  }
  Var dup_logits = agent::predict_object(g, w.params, dup, u, w.model);
  CHECK(dup_logits.value().at(0, 0) == dup_logits.value().at(0, 1));

  env::ViewpointObservation none = one;
  none.objects.clear();
  CHECK_THROWS_AS(agent::predict_object(g, w.params, none, u, w.model), ContractError);
}

TEST_CASE("teacher rollout follows the demonstrator shortest path") {
  World w(10);
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int start = static_cast<int>(rng.index(12));
    const int target = w.any_target(start, rng);
    EpisodeSpec spec = w.episode(start, target, 100 + trial);

    RolloutConfig rc;
    rc.mode = RolloutMode::kTeacher;
    rc.collect_loss = true;
    ModelConfig m = w.model;
    m.fusion.spatial = false;
    Graph g;
    auto out = agent::rollout(g, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, rc);

    const auto oracle = env::shortest_path(w.graph, start, target);
    CHECK(out.trace.nodes == oracle.nodes);
    CHECK(out.trace.final_node == target);
    CHECK(!out.trace.forced_stop);
    CHECK(out.trace.trajectory_length() == doctest::Approx(oracle.length).epsilon(1e-12));
    // Teacher reaches the target within the shortest-path hop count.
    CHECK(out.decisions <= static_cast<int>(oracle.nodes.size()));
  }
}

TEST_CASE("greedy rollout on a forced two-node world") {
  env::EnvConfig cfg = small_env_config();
  cfg.node_count = 2;
  cfg.degree = 1;
  World w(11, cfg);
  const int start = w.graph.objects_at(1).empty() ? 1 : 0;
  const int target = 1 - start;
  REQUIRE(!w.graph.objects_at(target).empty());
  EpisodeSpec spec = w.episode(start, target);

  RolloutConfig rc;
  rc.mode = RolloutMode::kGreedy;
  ModelConfig m = w.model;
  m.fusion.spatial = false;
  Graph g;
  auto out = agent::rollout(g, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, rc);
  // Wherever the untrained policy stops, the trace replays and stays within
  // the two-node world.
  for (int node : out.trace.nodes) CHECK((node == 0 || node == 1));
  CHECK(out.trace.nodes.size() == out.trace.edges.size() + 1);

  // Teacher mode is forced toward the target: [start, target], one edge.
  rc.mode = RolloutMode::kTeacher;
  Graph g2;
  auto teacher = agent::rollout(g2, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, rc);
  CHECK(teacher.trace.nodes == std::vector<int>{start, target});
  CHECK(teacher.trace.trajectory_length() ==
        doctest::Approx(w.graph.edges().front().length).epsilon(1e-12));
}

TEST_CASE("every trace is replayable: edges rebuild the node sequence and TL") {
  World w(12);
  Rng rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const int start = static_cast<int>(rng.index(12));
    const int target = w.any_target(start, rng);
    EpisodeSpec spec = w.episode(start, target, 300 + trial);
    RolloutConfig rc;
    rc.mode = trial % 2 ? RolloutMode::kSample : RolloutMode::kGreedy;
    rc.sample_seed = trial;
    rc.max_steps = 6;
    ModelConfig m = w.model;
    m.fusion.spatial = false;
    Graph g;
    auto out = agent::rollout(g, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, rc);

    int at = out.trace.nodes.front();
    double replayed = 0.0;
    for (std::size_t i = 0; i < out.trace.edges.size(); ++i) {
      const auto& e = out.trace.edges[i];
      REQUIRE(((e.u == at && e.v == out.trace.nodes[i + 1]) ||
               (e.v == at && e.u == out.trace.nodes[i + 1])));
      replayed += e.length;
      at = out.trace.nodes[i + 1];
    }
    CHECK(at == out.trace.final_node);
    CHECK(replayed == doctest::Approx(out.trace.trajectory_length()).epsilon(1e-12));

    // Acting distributions stay normalized at every step.
    for (const auto& step : out.trace.steps) {
      double total = 0.0;
      for (double p : step.probabilities) total += p;
      CHECK(std::fabs(total - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("budget exhaustion walks back to the max-stop-probability node") {
  World w(13);
  Rng rng(4);
  const int start = 0;
  const int target = w.any_target(start, rng);
  EpisodeSpec spec = w.episode(start, target, 17);
  RolloutConfig rc;
  rc.mode = RolloutMode::kSample;
  rc.sample_seed = 99;
  rc.max_steps = 3;
  ModelConfig m = w.model;
  m.fusion.spatial = false;
  Graph g;
  auto out = agent::rollout(g, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, rc);
  if (out.trace.forced_stop) {
    double best = -1.0;
    int best_node = -1;
    for (const auto& step : out.trace.steps) {
      if (step.stop_probability > best) {
        best = step.stop_probability;
        best_node = step.node;
      }
    }
    CHECK(out.trace.final_node == best_node);
  }
}

TEST_CASE("revisit penalty helper: xi = 1 is the exact identity") {
  std::vector<double> probs{0.2, 0.3, 0.5};
  std::vector<double> revisit{1.0, 0.0, 0.0};
  const auto same = agent::apply_revisit_penalty(probs, revisit, 1.0);
  CHECK(same == probs);  // bitwise

  const auto pushed = agent::apply_revisit_penalty(probs, revisit, 2.0);
  CHECK(pushed[0] < probs[0]);
  double total = 0.0;
  for (double p : pushed) total += p;
  CHECK(std::fabs(total - 1.0) < 1e-12);
  // No penalized candidate: untouched even for xi != 1.
  const auto untouched = agent::apply_revisit_penalty(probs, {0.0, 0.0, 0.0}, 4.0);
  CHECK(untouched == probs);
}

TEST_CASE("xi = 1 rollouts are bit-identical to the penalty-free code path") {
  World w(14);
  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const int start = static_cast<int>(rng.index(12));
    const int target = w.any_target(start, rng);
    EpisodeSpec spec = w.episode(start, target, 500 + trial);
    ModelConfig m = w.model;
    m.fusion.spatial = false;

    RolloutConfig with_xi;
    with_xi.mode = RolloutMode::kGreedy;
    with_xi.xi = 1.0;
    with_xi.collect_loss = false;
    RolloutConfig penalty_free = with_xi;
    penalty_free.xi = 8.0;
    penalty_free.disable_inference_penalty = true;

    Graph g1, g2;
    auto a = agent::rollout(g1, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, with_xi);
    auto b = agent::rollout(g2, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m,
                            penalty_free);
    CHECK(a.trace.to_json() == b.trace.to_json());
  }
}

TEST_CASE("trace JSONL round-trip preserves every field") {
  World w(15);
  Rng rng(6);
  const int start = 2;
  const int target = w.any_target(start, rng);
  EpisodeSpec spec = w.episode(start, target, 7);
  RolloutConfig rc;
  rc.mode = RolloutMode::kGreedy;
  ModelConfig m = w.model;
  m.fusion.spatial = false;
  Graph g;
  auto out = agent::rollout(g, w.params, w.graph, w.geo, nullptr, w.vocab, spec, m, rc);
  const std::string line = out.trace.to_json();
  CHECK(line.find('\n') == std::string::npos);
  auto back = agent::EpisodeTrace::from_json(line);
  CHECK(back.to_json() == line);
}

TEST_CASE("panoramic projection gradients pass the finite-difference check") {
  World w(16);
  const auto obs = env::observe(w.graph, 1);
  REQUIRE(!obs.objects.empty());
  text::NounExtraction nouns;
  nouns.categories = {0, 2};
  nouns.positions = {0, 1};
  ModelConfig m = w.model;
  m.fusion.spatial = false;
  auto f = [&](ParamStore& s) {
    Graph g;
    Var noun_features = text::encode_nouns(g, s, nouns, m.text);
    auto features = agent::assemble_panoramic(g, s, obs, noun_features, nouns.categories,
                                              nullptr, m);
    Var loss_v = g.sum(g.tanh_all(features.panoramic));
    g.backward(loss_v);
    g.flush_gradients(s);
    return loss_v.scalar();
  };
  auto report = numeric::grad_check(f, w.params);
  CHECK(report.max_rel_error < 1e-4);
}
