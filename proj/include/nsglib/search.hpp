#pragma once

#include "nsglib/core.hpp"
#include "nsglib/nsg.hpp"

namespace nsglib {

struct SearchParams {
  std::uint32_t l = 1;   // candidate pool size
  std::uint32_t k = 1;   // neighbors requested, k <= l
  PointId start = 0;
};

struct SearchStats {
  std::uint64_t hops = 0;                   // pool-expansion iterations
  std::uint64_t distance_computations = 0;  // one per node inserted into or rejected from the pool
  std::vector<Neighbor> results;            // first k pool entries, squared distances, ascending (distance, id)

  bool operator==(const SearchStats& other) const {
    return hops == other.hops && distance_computations == other.distance_computations &&
           results == other.results;
  }
};

// Greedy best-first search: expand the first unchecked pool entry, insert its
// unvisited out-neighbors, keep the pool sorted and truncated to l; stop when
// every pool entry is checked. Each node's distance is computed at most once
// per query. `collect_computed`, when given, receives every (id, distance)
// pair in computation order — the hook the NSG builder uses.
SearchStats search_on_graph(const DirectedGraph& graph, const Dataset& data,
                            std::span<const float> query, const SearchParams& params,
                            std::vector<Neighbor>* collect_computed = nullptr);

struct GreedyWalkResult {
  bool reached = false;
  std::vector<PointId> path;  // starts at `start`; strictly decreasing d(., target) after it
};

// No-backtracking specialization: step to the out-neighbor closest to the
// target iff it is strictly closer than the current node; stop at the target
// or at a local optimum.
GreedyWalkResult greedy_walk(const DirectedGraph& graph, const Dataset& data,
                             PointId target, PointId start);

// search_on_graph starting from the index's navigating node.
SearchStats search_nsg(const NsgIndex& index, const Dataset& data,
                       std::span<const float> query, std::uint32_t l, std::uint32_t k);

}  // namespace nsglib
