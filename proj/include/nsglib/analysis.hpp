#pragma once

#include <iosfwd>

#include "nsglib/core.hpp"
#include "nsglib/nsg.hpp"

namespace nsglib {

struct GraphReport {
  std::uint32_t n = 0;
  double aod = 0.0;             // average out-degree
  std::uint32_t mod = 0;        // maximum out-degree
  double nn_percent = 0.0;      // fraction of nodes whose out-edges include their exact NN
  std::uint32_t scc_count = 0;
  bool has_nav = false;
  PointId navigating_node = kNoNavigatingNode;
  std::uint32_t reachable_from_nav = 0;  // meaningful only when has_nav
};

GraphReport graph_report(const DirectedGraph& graph, const Dataset& data,
                         std::optional<PointId> navigating_node, int threads = 1);

void write_graph_report_csv(std::ostream& out, const GraphReport& report);

struct MsnetCheck {
  bool holds = true;
  // First counterexample in (p, q) order when holds is false.
  PointId p = 0;
  PointId q = 0;
  PointId stuck = 0;
};

// Runs greedy_walk for every ordered pair; holds iff every pair is reached
// (paths are strictly decreasing by construction). All-pairs cost: meant for
// n <= 1000.
MsnetCheck check_msnet(const DirectedGraph& graph, const Dataset& data, int threads = 1);

// Minimum over all nodes p and out-edge pairs (u, v) of the angle between
// u - p and v - p, in radians. Pi when no node has two usable out-edges.
double min_pairwise_edge_angle(const DirectedGraph& graph, const Dataset& data);

// Minimum over all non-degenerate, non-isosceles triples of the three absolute
// side-length differences. Triples with an exactly-zero side (duplicates) or
// two exactly-equal sides are skipped; +inf if nothing survives. O(n^3) with a
// precomputed distance matrix; refuses n > 2000 unless allow_large.
double estimate_delta_r(const Dataset& data, int threads = 1, bool allow_large = false);

struct HopScalingRecipe {
  std::uint32_t k = 20;
  std::uint32_t l_build = 40;
  std::uint32_t m = 24;
  std::uint64_t seed = 42;
  std::uint32_t exact_knn_threshold = 10000;  // larger subsamples use nn-descent
  int threads = 1;
};

struct HopScalingRow {
  std::uint32_t n = 0;
  std::uint32_t l = 0;       // smallest sweep value reaching the target, or the cap
  double precision = 0.0;
  double mean_hops = 0.0;
  double mean_distance_computations = 0.0;
  bool feasible = false;     // target precision reached within the sweep
};

// For each size: build an NSG on the dataset prefix, find the smallest l in
// l_sweep whose mean precision@K meets the target, and record mean hops and
// distance computations there. An unreachable target is reported in the row,
// not fatal.
std::vector<HopScalingRow> hop_scaling_experiment(const Dataset& base,
                                                  std::span<const std::uint32_t> sizes,
                                                  const Dataset& queries, std::uint32_t K,
                                                  double target_precision,
                                                  const HopScalingRecipe& recipe,
                                                  std::span<const std::uint32_t> l_sweep);

void write_hop_scaling_csv(std::ostream& out, std::span<const HopScalingRow> rows);

}  // namespace nsglib
