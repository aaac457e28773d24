#include "relnav/train/config.hpp"

#include <fstream>

#include <json.hpp>

#include "relnav/common/error.hpp"

namespace relnav::train {

agent::ModelConfig TrainConfig::model_config() const {
  agent::ModelConfig m = agent::ModelConfig::for_environment(env);
  m.text.d_model = d_model;
  m.text.max_len = max_len;
  m.tor_softmax = tor_softmax;
  m.fusion.temporal = temporal_relations;
  m.fusion.spatial = spatial_relations;
  m.alpha_init = alpha_init;
  return m;
}

loss::LossWeights TrainConfig::effective_lambdas() const {
  loss::LossWeights w = lambdas;
  if (!turning_back_penalty) w.tbp = 0.0;
  return w;
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["environments"] = {{"train", train_envs},
                       {"unseen", unseen_envs},
                       {"node_count", env.node_count},
                       {"degree", env.degree},
                       {"vocab_size", env.vocab_size},
                       {"objects_per_node", env.objects_per_node},
                       {"world_size", env.world_size},
                       {"n_views", env.obs.n_views},
                       {"d_view", env.obs.d_view},
                       {"d_obj", env.obs.d_obj}};
  j["model"] = {{"d_model", d_model},
                {"max_len", max_len},
                {"tor_softmax", tor_softmax},
                {"alpha_init", alpha_init}};
  j["relations"] = {{"k1", relation_constants.k1},
                    {"k2", relation_constants.k2},
                    {"k3", relation_constants.k3}};
  j["loss"] = {{"lambda_sap", lambdas.sap}, {"lambda_og", lambdas.og},
               {"lambda_tbp", lambdas.tbp}};
  j["optim"] = {{"lr", lr},
                {"momentum", momentum},
                {"iterations", iterations},
                {"teacher_warmup", teacher_warmup},
                {"sample_ratio", sample_ratio}};
  j["rollout"] = {{"max_steps", max_steps}, {"xi", xi}};
  j["episodes"] = {{"min_hops", min_hops},
                   {"max_hops", max_hops},
                   {"eval_episodes_per_env", eval_episodes_per_env},
                   {"eval_every", eval_every}};
  j["ablation"] = {{"temporal_relations", temporal_relations},
                   {"spatial_relations", spatial_relations},
                   {"turning_back_penalty", turning_back_penalty}};
  return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("train config: invalid JSON: ") + e.what());
  }
  TrainConfig c;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& ej = j.at("environments");
    c.train_envs = ej.at("train").get<int>();
    c.unseen_envs = ej.at("unseen").get<int>();
    c.env.node_count = ej.at("node_count").get<int>();
    c.env.degree = ej.at("degree").get<int>();
    c.env.vocab_size = ej.at("vocab_size").get<int>();
    c.env.objects_per_node = ej.at("objects_per_node").get<int>();
    c.env.world_size = ej.value("world_size", 0.0);
    c.env.obs.n_views = ej.value("n_views", 12);
    c.env.obs.d_view = ej.value("d_view", 20);
    c.env.obs.d_obj = ej.value("d_obj", 16);
    const auto& mj = j.at("model");
    c.d_model = mj.at("d_model").get<int>();
    c.max_len = mj.value("max_len", 24);
    c.tor_softmax = mj.value("tor_softmax", true);
    if (mj.contains("alpha_init")) {
      auto a = mj.at("alpha_init").get<std::vector<double>>();
      if (a.size() != 3) throw IoError("train config: alpha_init must have 3 entries");
      c.alpha_init = {a[0], a[1], a[2]};
    }
    const auto& rj = j.at("relations");
    c.relation_constants = {rj.at("k1").get<double>(), rj.at("k2").get<double>(),
                            rj.at("k3").get<double>()};
    const auto& lj = j.at("loss");
    c.lambdas = {lj.at("lambda_sap").get<double>(), lj.at("lambda_og").get<double>(),
                 lj.at("lambda_tbp").get<double>()};
    const auto& oj = j.at("optim");
    c.lr = oj.at("lr").get<double>();
    c.momentum = oj.value("momentum", 0.0);
    c.iterations = oj.at("iterations").get<int>();
    c.teacher_warmup = oj.value("teacher_warmup", 0.3);
    c.sample_ratio = oj.value("sample_ratio", 0.5);
    const auto& roj = j.at("rollout");
    c.max_steps = roj.value("max_steps", 15);
    c.xi = roj.value("xi", 1.0);
    const auto& epj = j.at("episodes");
    c.min_hops = epj.value("min_hops", 2);
    c.max_hops = epj.value("max_hops", 5);
    c.eval_episodes_per_env = epj.value("eval_episodes_per_env", 20);
    c.eval_every = epj.value("eval_every", 0);
    const auto& aj = j.at("ablation");
    c.temporal_relations = aj.value("temporal_relations", true);
    c.spatial_relations = aj.value("spatial_relations", true);
    c.turning_back_penalty = aj.value("turning_back_penalty", true);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("train config: missing or mistyped field: ") + e.what());
  }
  if (c.train_envs < 1 || c.unseen_envs < 1) {
    throw IoError("train config: at least one environment per split is required");
  }
  if (c.iterations < 0) throw IoError("train config: iterations must be >= 0");
  if (c.xi < 0.25) throw IoError("train config: xi must be >= 0.25");
  return c;
}

void TrainConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("TrainConfig::save: cannot open " + path);
  out << to_json() << "\n";
}

TrainConfig TrainConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("TrainConfig::load: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace relnav::train
