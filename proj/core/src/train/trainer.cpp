#include "relnav/train/trainer.hpp"

#include <ostream>
#include <sstream>

#include "relnav/common/error.hpp"
#include "relnav/env/shortest_path.hpp"
#include "relnav/loss/losses.hpp"
#include "relnav/train/episodes.hpp"

namespace relnav::train {

using numeric::Graph;
using numeric::Rng;
using numeric::Var;

ExperimentSetup ExperimentSetup::create(const TrainConfig& cfg) {
  ExperimentSetup setup;
  Rng train_seeds = Rng(cfg.seed).fork("train-envs");
  for (int i = 0; i < cfg.train_envs; ++i) {
    setup.train_split.push_back(env::generate_environment(train_seeds.next_u64(), cfg.env));
  }
  Rng unseen_seeds = Rng(cfg.seed).fork("unseen-envs");
  for (int i = 0; i < cfg.unseen_envs; ++i) {
    setup.unseen_split.push_back(env::generate_environment(unseen_seeds.next_u64(), cfg.env));
  }
  setup.vocab = text::Vocabulary::build(cfg.env.vocab_size);
  if (cfg.spatial_relations) {
    setup.relations = std::make_unique<rel::RelationMatrix>(rel::RelationMatrix::build(
        setup.train_split, cfg.env.vocab_size, cfg.relation_constants));
  }
  return setup;
}

TrainResult train(const TrainConfig& cfg, const ExperimentSetup& setup, std::ostream* progress) {
  const agent::ModelConfig model = cfg.model_config();
  const loss::LossWeights lambdas = cfg.effective_lambdas();

  TrainResult result;
  Rng param_rng = Rng(cfg.seed).fork("params");
  agent::init_model_params(result.params, setup.vocab, model, param_rng);

  std::vector<env::AllPairsGeodesics> geodesics;
  geodesics.reserve(setup.train_split.size());
  for (const auto& world : setup.train_split) geodesics.emplace_back(world);

  Rng episode_rng = Rng(cfg.seed).fork("train-episodes");
  Rng mode_rng = Rng(cfg.seed).fork("mode-mixing");
  const int warmup = static_cast<int>(cfg.teacher_warmup * cfg.iterations);

  for (int step = 0; step < cfg.iterations; ++step) {
    const std::size_t env_idx = episode_rng.index(setup.train_split.size());
    const env::EnvironmentGraph& world = setup.train_split[env_idx];
    const agent::EpisodeSpec spec = sample_episode(world, geodesics[env_idx], setup.vocab,
                                                   cfg.min_hops, cfg.max_hops, episode_rng);

    agent::RolloutConfig rc;
    rc.mode = (step < warmup || !mode_rng.bernoulli(cfg.sample_ratio))
                  ? agent::RolloutMode::kTeacher
                  : agent::RolloutMode::kSample;
    rc.max_steps = cfg.max_steps;
    rc.xi = 1.0;  // the inference penalty plays no role in training
    rc.collect_loss = true;
    rc.sample_seed = mode_rng.next_u64();

    try {
      Graph g;
      auto out = agent::rollout(g, result.params, world, geodesics[env_idx],
                                setup.relations.get(), setup.vocab, spec, model, rc);
      Var total = loss::total_loss(g, out.sap, out.og, out.tbp, lambdas);
      g.backward(total);
      g.flush_gradients(result.params);
      result.params.step_sgd(cfg.lr, cfg.momentum);
      result.sap_clamp_events += g.clamp_events();

      result.curve.push_back({step, out.sap.scalar(), out.og.scalar(), out.tbp.scalar(),
                              total.scalar()});
    } catch (const Error& e) {
      throw ContractError("train: aborted at step " + std::to_string(step) + ": " + e.what());
    }

    if (cfg.eval_every > 0 && (step + 1) % cfg.eval_every == 0) {
      EvalOptions opts;
      opts.episodes_per_env = cfg.eval_episodes_per_env;
      opts.max_steps = cfg.max_steps;
      opts.xi = cfg.xi;
      opts.min_hops = cfg.min_hops;
      opts.max_hops = cfg.max_hops;
      ValidationSnapshot snap;
      snap.step = step + 1;
      snap.report = evaluate(result.params, setup.unseen_split, setup.relations.get(),
                             setup.vocab, model, opts);
      if (progress) {
        (*progress) << "step " << (step + 1) << "  val-unseen  " << snap.report.summary_line()
                    << "\n";
      }
      result.snapshots.push_back(std::move(snap));
    }
  }
  return result;
}

std::string loss_curve_csv(const std::vector<LossRow>& curve) {
  std::ostringstream out;
  out << "step,sap,og,tbp,total\n";
  for (const LossRow& row : curve) {
    out << row.step << ',' << row.sap << ',' << row.og << ',' << row.tbp << ',' << row.total
        << '\n';
  }
  return out.str();
}

}  // namespace relnav::train
