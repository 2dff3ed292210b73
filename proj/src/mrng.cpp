#include "nsglib/mrng.hpp"

#include <algorithm>

#include "nsglib/parallel.hpp"

namespace nsglib {

bool in_lune(PointId p, PointId q, PointId r, const Dataset& data) {
  if (p == q || p == r || q == r) throw UsageError("in_lune requires distinct points");
  const std::uint32_t d = data.dim();
  float dpq = l2_sq(data.point_ptr(p), data.point_ptr(q), d);
  float drp = l2_sq(data.point_ptr(r), data.point_ptr(p), d);
  if (drp >= dpq) return false;
  float drq = l2_sq(data.point_ptr(r), data.point_ptr(q), d);
  return drq < dpq;
}

std::vector<PointId> select_mrng_neighbors(PointId p, std::span<const Neighbor> candidates,
                                           const Dataset& data, std::uint32_t cap,
                                           std::uint64_t* selection_distance_computations) {
  assert(std::is_sorted(candidates.begin(), candidates.end()));
  (void)p;  // referenced by debug asserts only
  const std::uint32_t d = data.dim();
  std::vector<PointId> selected;
  std::uint64_t dc = 0;
  for (const Neighbor& cand : candidates) {
    assert(cand.id != p);
    if (cap > 0 && selected.size() >= cap) break;
    bool conflict = false;
    for (PointId r : selected) {
      if (r == cand.id) {  // defensive: duplicated candidate
        conflict = true;
        break;
      }
      ++dc;
      // Candidates arrive sorted, so d(p,r) <= d(p,cand) and this comparison
      // is the whole lune test. Equality keeps the edge.
      if (l2_sq(data.point_ptr(r), data.point_ptr(cand.id), d) < cand.distance) {
        conflict = true;
        break;
      }
    }
    if (!conflict) selected.push_back(cand.id);
  }
  if (selection_distance_computations) *selection_distance_computations += dc;
  return selected;
}

DirectedGraph build_mrng(const Dataset& data, int threads) {
  const std::uint32_t n = data.size();
  if (n < 2) throw UsageError("build_mrng requires n >= 2");
  const std::uint32_t d = data.dim();
  DirectedGraph graph(n);
  parallel_blocks(0, n, threads, [&](std::uint32_t lo, std::uint32_t hi) {
    std::vector<Neighbor> candidates;
    candidates.reserve(n - 1);
    for (PointId p = lo; p < hi; ++p) {
      candidates.clear();
      const float* pp = data.point_ptr(p);
      for (PointId q = 0; q < n; ++q) {
        if (q == p) continue;
        candidates.emplace_back(q, l2_sq(pp, data.point_ptr(q), d));
      }
      std::sort(candidates.begin(), candidates.end());
      graph.row(p) = select_mrng_neighbors(p, candidates, data);
    }
  });
  graph.declared_max_out_degree = graph.max_out_degree();
  return graph;
}

DirectedGraph build_rng(const Dataset& data, int threads) {
  const std::uint32_t n = data.size();
  if (n < 2) throw UsageError("build_rng requires n >= 2");
  const std::uint32_t d = data.dim();

  // Pairwise squared distances up front; the pair loop is O(n^3) lookups.
  std::vector<float> dist(std::size_t(n) * n);
  parallel_for(0, n, threads, [&](std::uint32_t i) {
    for (PointId j = 0; j < n; ++j)
      dist[std::size_t(i) * n + j] = l2_sq(data.point_ptr(i), data.point_ptr(j), d);
  });
  auto sq = [&](PointId a, PointId b) { return dist[std::size_t(a) * n + b]; };

  // keep[p] holds p's partners q > p; symmetrized afterwards.
  std::vector<std::vector<PointId>> keep(n);
  parallel_for(0, n, threads, [&](std::uint32_t p) {
    for (PointId q = p + 1; q < n; ++q) {
      float dpq = sq(p, q);
      bool blocked = false;
      for (PointId r = 0; r < n; ++r) {
        if (r == p || r == q) continue;
        if (sq(r, p) < dpq && sq(r, q) < dpq) {
          blocked = true;
          break;
        }
      }
      if (!blocked) keep[p].push_back(q);
    }
  });

  DirectedGraph graph(n);
  for (PointId p = 0; p < n; ++p) {
    for (PointId q : keep[p]) {
      graph.row(p).push_back(q);
      graph.row(q).push_back(p);
    }
  }
  // Rows ascend by (distance, id) like every other builder's.
  std::vector<Neighbor> order;
  for (PointId p = 0; p < n; ++p) {
    auto& row = graph.row(p);
    order.clear();
    for (PointId q : row) order.emplace_back(q, sq(p, q));
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = order[i].id;
  }
  graph.declared_max_out_degree = graph.max_out_degree();
  return graph;
}

}  // namespace nsglib
