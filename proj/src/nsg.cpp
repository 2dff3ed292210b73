#include "nsglib/nsg.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "nsglib/mrng.hpp"
#include "nsglib/parallel.hpp"
#include "nsglib/search.hpp"

namespace nsglib {

PointId find_navigating_node(const DirectedGraph& knn_graph, const Dataset& data,
                             std::uint32_t l_build, std::uint64_t seed) {
  const std::uint32_t n = data.size();
  const std::uint32_t d = data.dim();
  if (knn_graph.size() != n) throw UsageError("find_navigating_node: graph and dataset sizes differ");
  if (l_build < 1) throw UsageError("find_navigating_node: l_build must be >= 1");

  std::vector<double> acc(d, 0.0);
  for (PointId i = 0; i < n; ++i) {
    const float* p = data.point_ptr(i);
    for (std::uint32_t j = 0; j < d; ++j) acc[j] += p[j];
  }
  std::vector<float> centroid(d);
  for (std::uint32_t j = 0; j < d; ++j) centroid[j] = static_cast<float>(acc[j] / n);

  std::mt19937_64 rng(seed);
  PointId start = static_cast<PointId>(rng() % n);
  SearchStats stats = search_on_graph(knn_graph, data, centroid, SearchParams{l_build, 1, start});
  return stats.results.front().id;
}

std::vector<Neighbor> collect_candidates(PointId v, const DirectedGraph& knn_graph,
                                         const Dataset& data, PointId navigating_node,
                                         std::uint32_t l_build,
                                         std::uint64_t* distance_computations) {
  const std::uint32_t d = data.dim();
  if (v >= data.size()) throw UsageError("collect_candidates: node out of range");

  std::vector<Neighbor> candidates;
  SearchStats stats = search_on_graph(knn_graph, data, data.point(v),
                                      SearchParams{l_build, 1, navigating_node}, &candidates);
  if (distance_computations) *distance_computations += stats.distance_computations;

  const float* vp = data.point_ptr(v);
  for (PointId nb : knn_graph.out(v)) {
    if (nb == v) continue;
    candidates.emplace_back(nb, l2_sq(vp, data.point_ptr(nb), d));
    if (distance_computations) ++*distance_computations;
  }

  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const Neighbor& a, const Neighbor& b) { return a.id == b.id; }),
                   candidates.end());
  std::erase_if(candidates, [v](const Neighbor& nb) { return nb.id == v; });
  return candidates;
}

namespace {

// Marks everything reachable from root over current out-edges.
void mark_reachable(const DirectedGraph& graph, PointId root, std::vector<char>& in_tree) {
  std::vector<PointId> stack;
  if (!in_tree[root]) {
    in_tree[root] = 1;
    stack.push_back(root);
  }
  while (!stack.empty()) {
    PointId cur = stack.back();
    stack.pop_back();
    for (PointId nb : graph.out(cur)) {
      if (!in_tree[nb]) {
        in_tree[nb] = 1;
        stack.push_back(nb);
      }
    }
  }
}

}  // namespace

std::uint32_t span_and_repair(DirectedGraph& graph, const Dataset& data, PointId navigating_node,
                              std::uint32_t l_build) {
  const std::uint32_t n = graph.size();
  if (navigating_node >= n) throw UsageError("span_and_repair: navigating node out of range");

  std::vector<char> in_tree(n, 0);
  mark_reachable(graph, navigating_node, in_tree);

  std::uint32_t edges_added = 0;
  PointId scan_from = 0;  // repairs only grow the tree, so the cursor is monotone
  while (true) {
    while (scan_from < n && in_tree[scan_from]) ++scan_from;
    if (scan_from == n) break;
    PointId orphan = scan_from;

    std::vector<Neighbor> computed;
    search_on_graph(graph, data, data.point(orphan),
                    SearchParams{l_build, 1, navigating_node}, &computed);
    std::sort(computed.begin(), computed.end());
    PointId source = navigating_node;
    for (const Neighbor& nb : computed) {
      if (in_tree[nb.id]) {
        source = nb.id;
        break;
      }
    }
    graph.row(source).push_back(orphan);
    ++edges_added;
    mark_reachable(graph, orphan, in_tree);
  }
  return edges_added;
}

NsgIndex build_nsg(const KnnGraph& knn, const Dataset& data, const NsgBuildParams& params) {
  const std::uint32_t n = data.size();
  if (knn.n != n) throw UsageError("build_nsg: kNN graph and dataset sizes differ");
  if (n < 2) throw UsageError("build_nsg requires n >= 2");
  if (params.m < 1) throw UsageError("build_nsg: m must be >= 1");
  if (params.l_build < 1) throw UsageError("build_nsg: l_build must be >= 1");

  auto t0 = std::chrono::steady_clock::now();
  const DirectedGraph knn_graph = knn.to_graph();
  const PointId nav = find_navigating_node(knn_graph, data, params.l_build, params.seed);
  const std::uint32_t cap =
      params.candidate_cap > 0 ? params.candidate_cap : std::max(params.l_build, 2 * params.m);

  DirectedGraph graph(n);
  std::vector<std::uint64_t> dc(n, 0);
  parallel_for(0, n, params.threads, [&](std::uint32_t v) {
    std::vector<Neighbor> candidates =
        collect_candidates(v, knn_graph, data, nav, params.l_build, &dc[v]);
    if (candidates.size() > cap) candidates.resize(cap);
    graph.row(v) = select_mrng_neighbors(v, candidates, data, params.m, &dc[v]);
  });

  NsgIndex index;
  index.build_info.source_k = knn.k;
  index.build_info.pre_repair_max_degree = graph.max_out_degree();
  index.build_info.repair_edges_added = span_and_repair(graph, data, nav, params.l_build);
  std::uint32_t widened = 0;
  for (PointId v = 0; v < n; ++v) {
    if (graph.out(v).size() > params.m) ++widened;
  }
  index.build_info.widened_nodes = widened;
  for (std::uint64_t c : dc) index.build_info.distance_computations += c;

  graph.declared_max_out_degree = graph.max_out_degree();
  index.graph = std::move(graph);
  index.navigating_node = nav;
  index.dim = data.dim();
  index.build_params = params;
  index.dataset_fingerprint = data.fingerprint();
  index.build_info.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return index;
}

}  // namespace nsglib
