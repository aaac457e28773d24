// relnav: command-line front end for the navigation testbed.
//
// Subcommands: gen-env, build-sor, train, eval, run-episode,
// export-relations, ablate. Every command is deterministic given its seed
// and inputs; output directories carry a manifest.json.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relnav/common/error.hpp"
#include "relnav/env/environment.hpp"
#include "relnav/env/shortest_path.hpp"
#include "relnav/rel/relation_matrix.hpp"
#include "relnav/train/ablation.hpp"
#include "relnav/train/config.hpp"
#include "relnav/train/episodes.hpp"
#include "relnav/train/evaluator.hpp"
#include "relnav/train/manifest.hpp"
#include "relnav/train/metrics.hpp"
#include "relnav/train/trainer.hpp"

namespace {

using namespace relnav;
namespace fs = std::filesystem;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::vector<env::EnvironmentGraph>* pick_split(train::ExperimentSetup& setup,
                                               const std::string& split) {
  if (split == "train" || split == "val_seen") return &setup.train_split;
  if (split == "val_unseen") return &setup.unseen_split;
  throw UsageError("unknown split: " + split + " (expected train|val_seen|val_unseen)");
}

train::EvalOptions eval_options(const train::TrainConfig& cfg, const std::string& split,
                                double xi) {
  train::EvalOptions opts;
  opts.episodes_per_env = cfg.eval_episodes_per_env;
  opts.max_steps = cfg.max_steps;
  opts.xi = xi;
  opts.min_hops = cfg.min_hops;
  opts.max_hops = cfg.max_hops;
  // Seen and unseen splits use distinct held-out episode streams.
  opts.episode_seed = split == "val_seen" ? 77001 : 58113;
  return opts;
}

int cmd_gen_env(std::uint64_t seed, int nodes, int degree, int vocab, int objects,
                const std::string& out) {
  env::EnvConfig cfg;
  cfg.node_count = nodes;
  cfg.degree = degree;
  cfg.vocab_size = vocab;
  cfg.objects_per_node = objects;
  const env::EnvironmentGraph g = env::generate_environment(seed, cfg);
  g.save(out);
  std::cout << "environment written to " << out << "\n"
            << "nodes " << g.node_count() << "  edges " << g.edges().size() << "  objects "
            << g.object_count() << "\n";
  return 0;
}

int cmd_build_sor(const std::vector<std::string>& env_paths, double k1, double k2, double k3,
                  const std::string& out) {
  std::vector<env::EnvironmentGraph> envs;
  envs.reserve(env_paths.size());
  for (const std::string& path : env_paths) envs.push_back(env::EnvironmentGraph::load(path));
  const int vocab = envs.front().config().vocab_size;
  for (const auto& g : envs) {
    if (g.config().vocab_size != vocab) {
      throw UsageError("build-sor: environments disagree on vocabulary size");
    }
  }
  rel::RelationMatrix m = rel::RelationMatrix::build(envs, vocab, {k1, k2, k3});
  m.save(out);
  std::cout << "relation matrix written to " << out << "\n"
            << "vocab " << m.vocab_size() << "  scans " << m.scan_count() << "\n"
            << "symmetry-gap " << m.max_asymmetry() << "  min-entry " << m.min_entry()
            << "  diagonal-max " << m.max_diagonal() << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
  const train::TrainConfig cfg = train::TrainConfig::load(config_path);
  ensure_dir(out_dir);
  const train::ExperimentSetup setup = train::ExperimentSetup::create(cfg);
  train::TrainResult result = train::train(cfg, setup, &std::cout);

  result.params.save(out_dir + "/params.json");
  write_file(out_dir + "/loss_curve.csv", train::loss_curve_csv(result.curve));
  if (setup.relations) setup.relations->save(out_dir + "/relations.json");

  train::EvalOptions opts = eval_options(cfg, "val_unseen", cfg.xi);
  train::MetricsReport report = train::evaluate(result.params, setup.unseen_split,
                                                setup.relations.get(), setup.vocab,
                                                cfg.model_config(), opts);
  write_file(out_dir + "/metrics.json", report.to_json() + "\n");
  write_file(out_dir + "/metrics.csv", report.summary_csv());
  train::write_manifest(out_dir, "train", cfg.to_json(), cfg.seed);
  std::cout << "val-unseen  " << report.summary_line() << "\n"
            << "artifacts written to " << out_dir << "\n";
  return 0;
}

int cmd_eval(const std::string& params_path, const std::string& config_path,
             const std::string& split, double xi, const std::string& out_dir) {
  const train::TrainConfig cfg = train::TrainConfig::load(config_path);
  ensure_dir(out_dir);
  numeric::ParamStore params = numeric::ParamStore::load(params_path);
  train::ExperimentSetup setup = train::ExperimentSetup::create(cfg);
  auto* envs = pick_split(setup, split);

  std::vector<agent::EpisodeTrace> traces;
  train::EvalOptions opts = eval_options(cfg, split, xi);
  train::MetricsReport report = train::evaluate(params, *envs, setup.relations.get(),
                                                setup.vocab, cfg.model_config(), opts, &traces);

  write_file(out_dir + "/metrics.json", report.to_json() + "\n");
  write_file(out_dir + "/metrics.csv", report.summary_csv());
  write_file(out_dir + "/episodes.csv", report.to_csv());
  std::ostringstream lines;
  for (const auto& t : traces) lines << t.to_json() << "\n";
  write_file(out_dir + "/traces.jsonl", lines.str());
  train::write_manifest(out_dir, "eval", cfg.to_json() + split + std::to_string(xi), cfg.seed);
  std::cout << split << "  " << report.summary_line() << "\n"
            << "artifacts written to " << out_dir << "\n";
  return 0;
}

int cmd_run_episode(const std::string& params_path, const std::string& env_path,
                    const std::string& episode_path, const std::string& mode_name, double xi,
                    const std::string& trace_out) {
  const env::EnvironmentGraph world = env::EnvironmentGraph::load(env_path);
  numeric::ParamStore params = numeric::ParamStore::load(params_path);
  const text::Vocabulary vocab = text::Vocabulary::build(world.config().vocab_size);
  const agent::EpisodeSpec spec = train::load_episode_spec(episode_path, world, vocab);
  const env::AllPairsGeodesics geo(world);

  agent::ModelConfig model = agent::ModelConfig::for_environment(world.config());
  model.fusion.spatial = false;  // a single environment carries no relation file

  agent::RolloutConfig rc;
  rc.mode = agent::rollout_mode_from_string(mode_name);
  rc.xi = xi;
  rc.collect_loss = false;
  numeric::Graph g;
  auto result = agent::rollout(g, params, world, geo, nullptr, vocab, spec, model, rc);

  std::cout << "instruction: " << spec.instruction.render(vocab) << "\n";
  std::cout << "path:";
  for (int node : result.trace.nodes) std::cout << ' ' << node;
  std::cout << "\nfinal " << result.trace.final_node << "  target " << spec.target_node
            << "  TL " << result.trace.trajectory_length() << "  predicted-object "
            << result.trace.predicted_object << "\n";
  if (!trace_out.empty()) write_file(trace_out, result.trace.to_json() + "\n");
  return 0;
}

int cmd_export_relations(const std::string& matrix_path, const std::string& out_csv) {
  const rel::RelationMatrix m = rel::RelationMatrix::load(matrix_path);
  m.export_csv(out_csv);
  std::cout << "relation matrix (" << m.vocab_size() << "x" << m.vocab_size()
            << ") exported to " << out_csv << "\n";
  return 0;
}

int cmd_export_attention(const std::string& params_path, const std::string& env_path,
                         const std::string& episode_path, const std::string& out_dir) {
  const env::EnvironmentGraph world = env::EnvironmentGraph::load(env_path);
  numeric::ParamStore params = numeric::ParamStore::load(params_path);
  const text::Vocabulary vocab = text::Vocabulary::build(world.config().vocab_size);
  const agent::EpisodeSpec spec = train::load_episode_spec(episode_path, world, vocab);
  const env::AllPairsGeodesics geo(world);
  ensure_dir(out_dir);

  agent::ModelConfig model = agent::ModelConfig::for_environment(world.config());
  model.fusion.spatial = false;

  // Re-derive the per-step temporal attention along a greedy rollout.
  agent::RolloutConfig rc;
  rc.collect_loss = false;
  numeric::Graph g;
  auto result = agent::rollout(g, params, world, geo, nullptr, vocab, spec, model, rc);

  text::NounExtraction nouns = text::extract_nouns(spec.instruction, vocab);
  if (nouns.empty()) {
    nouns.categories = {spec.target_object};
    nouns.positions = {0};
  }
  int written = 0;
  for (std::size_t step = 0; step < result.trace.steps.size(); ++step) {
    const auto obs = env::observe(world, result.trace.steps[step].node);
    if (obs.objects.empty()) continue;
    numeric::Graph sg;
    numeric::Var noun_features = text::encode_nouns(sg, params, nouns, model.text);
    auto tor = rel::tor_forward(sg, params, obs.object_features, noun_features, model.tor());
    std::ostringstream csv;
    for (std::size_t i = 0; i < tor.attention.rows(); ++i) {
      for (std::size_t j = 0; j < tor.attention.cols(); ++j) {
        if (j) csv << ',';
        csv << tor.attention.value().at(i, j);
      }
      csv << '\n';
    }
    write_file(out_dir + "/step_" + std::to_string(step) + "_attention.csv", csv.str());
    ++written;
  }
  std::cout << written << " per-step attention matrices exported to " << out_dir << "\n";
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& seeds_arg,
               const std::string& out_dir) {
  const train::TrainConfig base = train::TrainConfig::load(config_path);
  ensure_dir(out_dir);
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(seeds_arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw UsageError("ablate: --seeds must name at least one seed");

  train::AblationResult result = train::run_ablation(base, seeds, &std::cout);
  write_file(out_dir + "/ablation.csv", result.to_csv());
  write_file(out_dir + "/ablation.txt", result.table());
  train::write_manifest(out_dir, "ablate", base.to_json() + seeds_arg, base.seed);
  std::cout << result.table() << "artifacts written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relnav: object-relation navigation testbed"};
  app.require_subcommand(1);

  // gen-env
  auto* gen = app.add_subcommand("gen-env", "generate a synthetic environment");
  std::uint64_t seed = 7;
  int nodes = 30, degree = 3, vocab = 24, objects = 3;
  std::string out = "environment.json";
  gen->add_option("--seed", seed, "generation seed");
  gen->add_option("--nodes", nodes, "node count")->check(CLI::Range(2, 100000));
  gen->add_option("--degree", degree, "k-nearest-neighbor degree")->check(CLI::Range(1, 64));
  gen->add_option("--vocab", vocab, "object category count")->check(CLI::Range(1, 100000));
  gen->add_option("--objects", objects, "max objects per node")->check(CLI::Range(0, 64));
  gen->add_option("--out", out, "output path");

  // build-sor
  auto* sor = app.add_subcommand("build-sor", "build the spatial relation matrix");
  std::vector<std::string> env_paths;
  double k1 = 2.0, k2 = 2.0, k3 = 5e-4;
  std::string sor_out = "relations.json";
  sor->add_option("--envs", env_paths, "environment files")->required()->expected(-1);
  sor->add_option("--k1", k1, "numerator constant");
  sor->add_option("--k2", k2, "direction-gap weight");
  sor->add_option("--k3", k3, "depth-gap weight");
  sor->add_option("--out", sor_out, "output path");

  // train
  auto* tr = app.add_subcommand("train", "train a policy from a config file");
  std::string config_path, out_dir = "run";
  tr->add_option("--config", config_path, "train config JSON")->required();
  tr->add_option("--out-dir", out_dir, "output directory");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate saved parameters on a split");
  std::string params_path, split = "val_unseen";
  double xi = 1.0;
  std::string eval_out = "eval";
  ev->add_option("--params", params_path, "params.json from train")->required();
  ev->add_option("--config", config_path, "train config JSON")->required();
  ev->add_option("--split", split, "train|val_seen|val_unseen");
  ev->add_option("--xi", xi, "inference revisit-penalty divisor")->check(CLI::Range(0.25, 1e9));
  ev->add_option("--out-dir", eval_out, "output directory");

  // run-episode
  auto* run = app.add_subcommand("run-episode", "roll out one episode");
  std::string env_path, episode_path, mode_name = "greedy", trace_out;
  run->add_option("--params", params_path, "params.json")->required();
  run->add_option("--env", env_path, "environment JSON")->required();
  run->add_option("--episode", episode_path, "episode spec JSON")->required();
  run->add_option("--mode", mode_name, "teacher|sample|greedy");
  run->add_option("--xi", xi, "inference revisit-penalty divisor")->check(CLI::Range(0.25, 1e9));
  run->add_option("--out", trace_out, "optional trace JSONL output");

  // export-relations
  auto* exp = app.add_subcommand("export-relations",
                                 "export the relation matrix (and optional per-step attention)");
  std::string matrix_path, out_csv = "relations.csv", attention_dir;
  exp->add_option("--matrix", matrix_path, "relation matrix JSON")->required();
  exp->add_option("--out-csv", out_csv, "matrix CSV destination");
  exp->add_option("--params", params_path, "params.json (for attention export)");
  exp->add_option("--env", env_path, "environment JSON (for attention export)");
  exp->add_option("--episode", episode_path, "episode spec (for attention export)");
  exp->add_option("--attention-dir", attention_dir, "per-step attention CSV directory");

  // ablate
  auto* ab = app.add_subcommand("ablate", "run the module/penalty ablation grid");
  std::string seeds_arg = "1,2,3,4,5";
  std::string ablate_out = "ablation";
  ab->add_option("--config", config_path, "base train config JSON")->required();
  ab->add_option("--seeds", seeds_arg, "comma-separated seeds");
  ab->add_option("--out-dir", ablate_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_env(seed, nodes, degree, vocab, objects, out);
    if (sor->parsed()) return cmd_build_sor(env_paths, k1, k2, k3, sor_out);
    if (tr->parsed()) return cmd_train(config_path, out_dir);
    if (ev->parsed()) return cmd_eval(params_path, config_path, split, xi, eval_out);
    if (run->parsed()) {
      return cmd_run_episode(params_path, env_path, episode_path, mode_name, xi, trace_out);
    }
    if (exp->parsed()) {
      const int rc = cmd_export_relations(matrix_path, out_csv);
      if (rc == 0 && !attention_dir.empty()) {
        if (params_path.empty() || env_path.empty() || episode_path.empty()) {
          throw UsageError("--attention-dir requires --params, --env and --episode");
        }
        return cmd_export_attention(params_path, env_path, episode_path, attention_dir);
      }
      return rc;
    }
    if (ab->parsed()) return cmd_ablate(config_path, seeds_arg, ablate_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
