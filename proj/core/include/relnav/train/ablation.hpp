#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relnav/train/trainer.hpp"

namespace relnav::train {

struct AblationRow {
  std::string name;
  bool temporal = false;
  bool spatial = false;
  bool turning_back = false;
  std::vector<MetricsReport> per_seed;  // val-unseen, one per seed
  MetricsReport median;                 // per-metric median across seeds
};

struct AblationResult {
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRow> rows;

  std::string to_csv() const;
  std::string table() const;  // human-readable comparison table
};

// The relation-module grid (both off / spatial only / temporal only / both
// on, all without the turning-back penalty) plus the penalty row with both
// relation modules on. Each configuration trains from scratch per seed and
// is scored on the unseen split.
AblationResult run_ablation(const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                            std::ostream* progress = nullptr);

double median_of(std::vector<double> values);

}  // namespace relnav::train
