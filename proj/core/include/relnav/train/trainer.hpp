#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "relnav/train/config.hpp"
#include "relnav/train/evaluator.hpp"
#include "relnav/train/metrics.hpp"

namespace relnav::train {

struct LossRow {
  int step = 0;
  double sap = 0.0;
  double og = 0.0;
  double tbp = 0.0;
  double total = 0.0;
};

struct ValidationSnapshot {
  int step = 0;
  MetricsReport report;
};

// Generated splits plus the supporting pieces every experiment needs.
struct ExperimentSetup {
  std::vector<env::EnvironmentGraph> train_split;
  std::vector<env::EnvironmentGraph> unseen_split;
  text::Vocabulary vocab;
  // Built from the training environments; null when the spatial branch is off.
  std::unique_ptr<rel::RelationMatrix> relations;

  static ExperimentSetup create(const TrainConfig& cfg);
};

struct TrainResult {
  numeric::ParamStore params;
  std::vector<LossRow> curve;
  std::vector<ValidationSnapshot> snapshots;
  std::size_t sap_clamp_events = 0;
};

// Fine-tuning loop: sample an episode, roll out under mixed
// teacher/sample supervision, assemble the combined objective, take an SGD
// step. Deterministic given the config seed. A non-finite loss aborts with
// the step index and component name.
TrainResult train(const TrainConfig& cfg, const ExperimentSetup& setup,
                  std::ostream* progress = nullptr);

std::string loss_curve_csv(const std::vector<LossRow>& curve);

}  // namespace relnav::train
