#include "relnav/train/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "relnav/common/error.hpp"

namespace relnav::train {

namespace {

// Single-source geodesics, local to metric computation.
std::vector<double> distances_from(const env::EnvironmentGraph& g, int source) {
  const int n = g.node_count();
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  dist[static_cast<std::size_t>(source)] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    for (const auto& [v, len] : g.neighbors(u)) {
      if (d + len < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = d + len;
        heap.emplace(d + len, v);
      }
    }
  }
  return dist;
}

void require_replayable(const agent::EpisodeTrace& t, const env::EnvironmentGraph& g) {
  if (t.nodes.empty()) throw ContractError("compute_metrics: trace has no nodes");
  if (t.edges.size() + 1 != t.nodes.size()) {
    throw ContractError("compute_metrics: trace edge count does not match node count");
  }
  int at = t.nodes.front();
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    const auto& e = t.edges[i];
    const int next = t.nodes[i + 1];
    if (!((e.u == at && e.v == next) || (e.u == next && e.v == at))) {
      throw ContractError("compute_metrics: trace edge does not join consecutive nodes");
    }
    bool adjacent = false;
    for (const auto& [nb, len] : g.neighbors(at)) {
      if (nb == next && std::fabs(len - e.length) < 1e-9) adjacent = true;
    }
    if (!adjacent) throw ContractError("compute_metrics: trace edge is not in the environment");
    at = next;
  }
  if (at != t.final_node) {
    throw ContractError("compute_metrics: trace does not end at its final node");
  }
}

}  // namespace

MetricsReport compute_metrics(const std::vector<agent::EpisodeTrace>& traces,
                              const std::vector<const env::EnvironmentGraph*>& environments,
                              double success_radius) {
  if (traces.empty()) throw ContractError("compute_metrics: empty trace set");
  if (traces.size() != environments.size()) {
    throw ContractError("compute_metrics: trace/environment count mismatch");
  }

  MetricsReport report;
  report.episodes = traces.size();
  report.rows.reserve(traces.size());

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const agent::EpisodeTrace& t = traces[i];
    const env::EnvironmentGraph& g = *environments[i];
    require_replayable(t, g);

    const std::vector<double> to_target = distances_from(g, t.target_node);

    EpisodeMetrics em;
    em.trajectory_length = t.trajectory_length();
    em.navigation_error = to_target[static_cast<std::size_t>(t.final_node)];
    em.shortest_length = to_target[static_cast<std::size_t>(t.start)];
    em.success = em.navigation_error < success_radius;
    for (int node : t.nodes) {
      if (to_target[static_cast<std::size_t>(node)] < success_radius) em.oracle_success = true;
    }
    em.grounded = em.success && t.predicted_object == t.target_object;
    const double denom = std::max(em.shortest_length, em.trajectory_length);
    const double weight = denom > 0.0 ? em.shortest_length / denom : 1.0;
    em.spl = em.success ? weight : 0.0;
    em.rgspl = em.grounded ? weight : 0.0;
    em.reused_length = t.reused_edge_length();

    report.tl += em.trajectory_length;
    report.ne += em.navigation_error;
    report.sr += em.success ? 1.0 : 0.0;
    report.osr += em.oracle_success ? 1.0 : 0.0;
    report.spl += em.spl;
    report.rgs += em.grounded ? 1.0 : 0.0;
    report.rgspl += em.rgspl;
    report.mean_reused_length += em.reused_length;
    report.rows.push_back(em);
  }

  const double n = static_cast<double>(report.episodes);
  report.tl /= n;
  report.ne /= n;
  report.sr /= n;
  report.osr /= n;
  report.spl /= n;
  report.rgs /= n;
  report.rgspl /= n;
  report.mean_reused_length /= n;
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::json j;
  j["episodes"] = episodes;
  j["tl"] = tl;
  j["ne"] = ne;
  j["sr"] = sr;
  j["osr"] = osr;
  j["spl"] = spl;
  j["rgs"] = rgs;
  j["rgspl"] = rgspl;
  j["mean_reused_length"] = mean_reused_length;
  return j.dump(2);
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out << "episode,tl,ne,shortest,success,oracle_success,grounded,spl,rgspl,reused_length\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EpisodeMetrics& r = rows[i];
    out << i << ',' << r.trajectory_length << ',' << r.navigation_error << ','
        << r.shortest_length << ',' << (r.success ? 1 : 0) << ',' << (r.oracle_success ? 1 : 0)
        << ',' << (r.grounded ? 1 : 0) << ',' << r.spl << ',' << r.rgspl << ','
        << r.reused_length << '\n';
  }
  return out.str();
}

std::string MetricsReport::summary_csv() const {
  std::ostringstream out;
  out << "episodes,tl,ne,sr,osr,spl,rgs,rgspl,mean_reused_length\n";
  out << episodes << ',' << tl << ',' << ne << ',' << sr << ',' << osr << ',' << spl << ','
      << rgs << ',' << rgspl << ',' << mean_reused_length << '\n';
  return out.str();
}

std::string MetricsReport::summary_line() const {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed;
  out << "TL " << tl << "  NE " << ne << "  SR " << sr << "  OSR " << osr << "  SPL " << spl
      << "  RGS " << rgs << "  RGSPL " << rgspl;
  return out.str();
}

}  // namespace relnav::train
