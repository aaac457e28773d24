#pragma once

#include <string>
#include <vector>

#include "relnav/agent/rollout.hpp"
#include "relnav/env/environment.hpp"

namespace relnav::train {

struct EpisodeMetrics {
  double trajectory_length = 0.0;  // TL, meters
  double navigation_error = 0.0;   // NE, geodesic(final, target), meters
  double shortest_length = 0.0;    // geodesic(start, target)
  bool success = false;            // NE < radius
  bool oracle_success = false;     // any visited node within radius
  bool grounded = false;           // success and predicted object == target
  double spl = 0.0;
  double rgspl = 0.0;
  double reused_length = 0.0;      // total re-traversed edge length
};

struct MetricsReport {
  double tl = 0.0;
  double ne = 0.0;
  double sr = 0.0;
  double osr = 0.0;
  double spl = 0.0;
  double rgs = 0.0;
  double rgspl = 0.0;
  double mean_reused_length = 0.0;
  std::size_t episodes = 0;
  std::vector<EpisodeMetrics> rows;

  std::string to_json() const;
  std::string to_csv() const;       // per-episode rows
  std::string summary_csv() const;  // single aggregate line with header
  std::string summary_line() const;
};

// Computes the full metric suite over replayable traces. environments[i]
// is the world trace i ran in. Throws ContractError on an empty trace set
// or a trace whose edge sequence does not replay its node sequence.
MetricsReport compute_metrics(const std::vector<agent::EpisodeTrace>& traces,
                              const std::vector<const env::EnvironmentGraph*>& environments,
                              double success_radius = 3.0);

}  // namespace relnav::train
