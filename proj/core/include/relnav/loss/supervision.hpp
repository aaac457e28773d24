#pragma once

#include <vector>

#include "relnav/agent/topo_map.hpp"
#include "relnav/env/shortest_path.hpp"

namespace relnav::loss {

// Candidate id for the stop action in candidate lists.
inline constexpr int kStopAction = -1;

// Pseudo-interactive demonstrator: STOP when already at the target,
// otherwise the frontier node minimizing geodesic(current -> f) +
// geodesic(f -> target) in the full graph, ties toward the lowest node id.
// Returns kStopAction when the frontier is empty.
int demonstrator_action(const agent::TopoMap& map, const env::AllPairsGeodesics& geo, int target);

// Per-candidate revisit distances d_i: the total length of already-traversed
// edges on the known-map shortest path from the current node to the
// candidate. kStopAction contributes 0.
std::vector<double> revisit_distances(const agent::TopoMap& map,
                                      const std::vector<int>& candidates);

}  // namespace relnav::loss
