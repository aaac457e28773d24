#include "relnav/loss/supervision.hpp"

#include "relnav/common/error.hpp"

namespace relnav::loss {

int demonstrator_action(const agent::TopoMap& map, const env::AllPairsGeodesics& geo,
                        int target) {
  if (map.current() == target) return kStopAction;
  int best = kStopAction;
  double best_cost = 0.0;
  for (int f : map.frontier()) {
    const double cost = geo.at(map.current(), f) + geo.at(f, target);
    if (best == kStopAction || cost < best_cost) {
      best = f;
      best_cost = cost;
    }
  }
  return best;  // frontier is id-sorted, so equal costs keep the lowest id
}

std::vector<double> revisit_distances(const agent::TopoMap& map,
                                      const std::vector<int>& candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (int c : candidates) {
    if (c == kStopAction) {
      out.push_back(0.0);
      continue;
    }
    out.push_back(map.reused_length(map.known_path(map.current(), c)));
  }
  return out;
}

}  // namespace relnav::loss
