#include "nsglib/search.hpp"

#include <algorithm>

namespace nsglib {

SearchStats search_on_graph(const DirectedGraph& graph, const Dataset& data,
                            std::span<const float> query, const SearchParams& params,
                            std::vector<Neighbor>* collect_computed) {
  const std::uint32_t n = graph.size();
  if (n == 0 || n != data.size()) throw UsageError("search: graph and dataset sizes differ");
  if (query.size() != data.dim()) throw UsageError("search: query dimension mismatch");
  if (params.start >= n) throw UsageError("search: start node out of range");
  if (params.k < 1 || params.k > params.l) throw UsageError("search: require 1 <= k <= l");

  const std::uint32_t l = params.l;
  const std::uint32_t d = data.dim();
  const float* q = query.data();

  SearchStats stats;
  // visited = distance already computed (and cached); in_pool tracks current
  // membership so an evicted node can be re-admitted later without a second
  // distance computation. Algorithm: the pool has no memory of evictions.
  std::vector<char> visited(n, 0), in_pool(n, 0);
  std::vector<float> cached(n, 0.0f);
  std::vector<Neighbor> pool;
  pool.reserve(std::size_t(l) + 1);

  auto distance_to = [&](PointId id) {
    if (!visited[id]) {
      visited[id] = 1;
      cached[id] = l2_sq(q, data.point_ptr(id), d);
      ++stats.distance_computations;
      if (collect_computed) collect_computed->emplace_back(id, cached[id]);
    }
    return cached[id];
  };

  pool.emplace_back(params.start, distance_to(params.start));
  in_pool[params.start] = 1;

  std::size_t cur = 0;  // first possibly-unchecked pool position
#ifndef NDEBUG
  float frontier = pool.front().distance;
#endif
  while (cur < pool.size()) {
#ifndef NDEBUG
    assert(pool.front().distance <= frontier);  // the frontier never retreats
    frontier = pool.front().distance;
#endif
    if (pool[cur].checked) {
      ++cur;
      continue;
    }
    pool[cur].checked = true;
    ++stats.hops;
    const PointId expand = pool[cur].id;  // insertions below shift the vector
    std::size_t lowest_insert = pool.size();
    for (PointId nb : graph.out(expand)) {
      if (in_pool[nb]) continue;
      Neighbor cand(nb, distance_to(nb));
      if (pool.size() >= l && !(cand < pool.back())) continue;  // rejected
      auto it = std::lower_bound(pool.begin(), pool.end(), cand);
      std::size_t pos = static_cast<std::size_t>(it - pool.begin());
      pool.insert(it, cand);
      in_pool[nb] = 1;
      if (pool.size() > l) {
        in_pool[pool.back().id] = 0;
        pool.pop_back();
      }
      lowest_insert = std::min(lowest_insert, pos);
    }
    if (lowest_insert <= cur) cur = lowest_insert;
    else ++cur;
  }

  std::size_t take = std::min<std::size_t>(params.k, pool.size());
  stats.results.assign(pool.begin(), pool.begin() + take);
  for (Neighbor& nb : stats.results) nb.checked = false;
  return stats;
}

GreedyWalkResult greedy_walk(const DirectedGraph& graph, const Dataset& data, PointId target,
                             PointId start) {
  const std::uint32_t n = graph.size();
  if (n == 0 || n != data.size()) throw UsageError("greedy_walk: graph and dataset sizes differ");
  if (target >= n || start >= n) throw UsageError("greedy_walk: node out of range");

  const std::uint32_t d = data.dim();
  const float* tp = data.point_ptr(target);

  GreedyWalkResult result;
  PointId cur = start;
  float cur_dist = l2_sq(data.point_ptr(cur), tp, d);
  result.path.push_back(cur);
  while (cur != target) {
    Neighbor best;
    bool found = false;
    for (PointId nb : graph.out(cur)) {
      Neighbor cand(nb, l2_sq(data.point_ptr(nb), tp, d));
      if (!found || cand < best) {
        best = cand;
        found = true;
      }
    }
    if (!found || !(best.distance < cur_dist)) break;  // local optimum
    cur = best.id;
    cur_dist = best.distance;
    result.path.push_back(cur);
  }
  result.reached = (cur == target);
  return result;
}

SearchStats search_nsg(const NsgIndex& index, const Dataset& data, std::span<const float> query,
                       std::uint32_t l, std::uint32_t k) {
  if (index.navigating_node == kNoNavigatingNode)
    throw UsageError("search_nsg: index has no navigating node");
  return search_on_graph(index.graph, data, query, SearchParams{l, k, index.navigating_node});
}

}  // namespace nsglib
