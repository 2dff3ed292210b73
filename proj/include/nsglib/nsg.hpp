#pragma once

#include "nsglib/core.hpp"
#include "nsglib/knn.hpp"

namespace nsglib {

struct NsgBuildParams {
  std::uint32_t l_build = 60;    // candidate pool size for the build-time searches
  std::uint32_t m = 32;          // max out-degree before repair
  std::uint32_t candidate_cap = 0;  // selection pool truncation; 0 = max(l_build, 2m)
  std::uint64_t seed = 42;
  int threads = 1;
};

struct NsgBuildInfo {
  std::uint32_t source_k = 0;               // k of the input kNN graph
  std::uint32_t pre_repair_max_degree = 0;
  std::uint32_t repair_edges_added = 0;
  std::uint32_t widened_nodes = 0;          // nodes pushed past m by repair
  std::uint64_t distance_computations = 0;  // search + candidate + selection
  double build_seconds = 0.0;
};

// The deployable artifact: graph plus fixed search entry point. After build,
// every node is reachable from navigating_node and out-degrees respect m
// except for the repair-widened nodes tracked in build_info.
struct NsgIndex {
  DirectedGraph graph;
  PointId navigating_node = kNoNavigatingNode;
  std::uint32_t dim = 0;
  NsgBuildParams build_params;
  NsgBuildInfo build_info;
  std::uint64_t dataset_fingerprint = 0;
};

// Approximate medoid: searches the kNN graph for the coordinate-wise centroid
// from a seeded random start and returns the rank-1 result.
PointId find_navigating_node(const DirectedGraph& knn_graph, const Dataset& data,
                             std::uint32_t l_build, std::uint64_t seed);

// Search-and-collect for one node: every node whose distance to v gets
// computed while searching for v from the navigating node, unioned with v's
// kNN out-neighbors (distances recomputed), minus v, deduplicated, sorted
// ascending by (distance, id).
std::vector<Neighbor> collect_candidates(PointId v, const DirectedGraph& knn_graph,
                                         const Dataset& data, PointId navigating_node,
                                         std::uint32_t l_build,
                                         std::uint64_t* distance_computations = nullptr);

// Grows the set reachable from `navigating_node` until it covers the graph:
// repeatedly DFS, then link the smallest-id unreached node from its
// approximate nearest in-tree node (found by searching the current graph for
// that node's point). Returns the number of edges added.
std::uint32_t span_and_repair(DirectedGraph& graph, const Dataset& data,
                              PointId navigating_node, std::uint32_t l_build);

// Full construction from a prebuilt kNN graph: navigating node, per-node
// search-collect-select capped at m, then span_and_repair.
NsgIndex build_nsg(const KnnGraph& knn, const Dataset& data, const NsgBuildParams& params);

}  // namespace nsglib
