#pragma once

#include <functional>

#include "nsglib/core.hpp"

namespace nsglib {

// k out-neighbors per node, each annotated with its squared distance, rows
// sorted ascending by (distance, id).
struct KnnGraph {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::vector<Neighbor> flat;  // n * k, row-major

  std::span<const Neighbor> row(PointId p) const {
    assert(p < n);
    return {flat.data() + std::size_t(p) * k, k};
  }

  // Adjacency-only view for search; preserves row order.
  DirectedGraph to_graph() const;
};

// Brute-force exact kNN: node p's row is exactly the k nearest other points,
// tie-broken by id. Throws UsageError unless 1 <= k < n.
KnnGraph exact_knn_graph(const Dataset& data, std::uint32_t k, int threads = 1);

struct NnDescentParams {
  std::uint32_t k = 20;
  double sample_rate = 1.0;             // rho: fraction of k sampled per join round
  std::uint32_t max_iters = 12;
  double convergence_threshold = 0.001; // stop when updates < threshold * n * k
  std::uint64_t seed = 42;
  int threads = 1;
};

// Called after every iteration with the current graph state; test hook for
// convergence measurements.
using NnDescentObserver = std::function<void(std::uint32_t iter, const KnnGraph&)>;

// Iterative neighbor-of-neighbor refinement of a random initial graph. The
// join is block-synchronous with per-node pool ownership, so serial and
// parallel runs produce the same graph for a fixed seed.
KnnGraph nn_descent(const Dataset& data, const NnDescentParams& params,
                    const NnDescentObserver& observer = nullptr);

// Mean over nodes of |approx row ids / exact row ids| / k. Throws UsageError
// if the two graphs differ in n or k.
double knn_graph_recall(const KnnGraph& approx, const KnnGraph& exact);

}  // namespace nsglib
