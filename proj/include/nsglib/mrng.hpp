#pragma once

#include "nsglib/core.hpp"

namespace nsglib {

// True iff r lies strictly inside lune_pq = B(p, d(p,q)) and B(q, d(p,q)).
// Boundary points (either distance equal to d(p,q)) are outside. Throws
// UsageError unless p, q, r are distinct.
bool in_lune(PointId p, PointId q, PointId r, const Dataset& data);

// Edge selection shared by the MRNG and NSG builders. `candidates` must be
// sorted ascending by (distance to p, id) with p excluded; the first candidate
// is always kept and a later candidate q is kept iff no already-selected r has
// d(r,q) < d(p,q). Because candidates arrive sorted, d(p,r) <= d(p,q) always
// holds, so this single comparison is the full lune test. Equal distances fall
// back to the id order of the sort, which resolves isosceles ties toward the
// smaller id. Stops at `cap` edges when cap > 0.
// `selection_distance_computations`, when given, accumulates the number of
// d(r,q) evaluations.
std::vector<PointId> select_mrng_neighbors(PointId p, std::span<const Neighbor> candidates,
                                           const Dataset& data, std::uint32_t cap = 0,
                                           std::uint64_t* selection_distance_computations = nullptr);

// Exact construction: every node selects over all other points. O(n^2 log n +
// n^2 c); intended as the oracle-scale reference, not a production index.
DirectedGraph build_mrng(const Dataset& data, int threads = 1);

// Relative neighborhood graph with undirected semantics (each kept edge stored
// in both directions): pq present iff no third point lies in lune_pq. O(n^3).
DirectedGraph build_rng(const Dataset& data, int threads = 1);

}  // namespace nsglib
