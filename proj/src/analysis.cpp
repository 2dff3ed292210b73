#include "nsglib/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "nsglib/bench.hpp"
#include "nsglib/knn.hpp"
#include "nsglib/parallel.hpp"
#include "nsglib/search.hpp"

namespace nsglib {

namespace {

// Exact nearest other point per node, tie-broken by id.
std::vector<PointId> exact_nearest(const Dataset& data, int threads) {
  const std::uint32_t n = data.size();
  const std::uint32_t d = data.dim();
  std::vector<PointId> nn(n);
  parallel_for(0, n, threads, [&](std::uint32_t p) {
    Neighbor best;
    bool found = false;
    const float* pp = data.point_ptr(p);
    for (PointId q = 0; q < n; ++q) {
      if (q == p) continue;
      Neighbor cand(q, l2_sq(pp, data.point_ptr(q), d));
      if (!found || cand < best) {
        best = cand;
        found = true;
      }
    }
    nn[p] = best.id;
  });
  return nn;
}

std::uint32_t count_reachable(const DirectedGraph& graph, PointId root) {
  std::vector<char> seen(graph.size(), 0);
  std::vector<PointId> stack{root};
  seen[root] = 1;
  std::uint32_t count = 1;
  while (!stack.empty()) {
    PointId cur = stack.back();
    stack.pop_back();
    for (PointId nb : graph.out(cur)) {
      if (!seen[nb]) {
        seen[nb] = 1;
        ++count;
        stack.push_back(nb);
      }
    }
  }
  return count;
}

// Iterative Tarjan SCC; returns the component count.
std::uint32_t scc_count(const DirectedGraph& graph) {
  const std::uint32_t n = graph.size();
  constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
  std::vector<std::uint32_t> index(n, kUnset), lowlink(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<PointId> stack;
  std::uint32_t next_index = 0, components = 0;

  struct Frame {
    PointId node;
    std::size_t edge;
  };
  std::vector<Frame> frames;

  for (PointId root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      PointId v = f.node;
      if (f.edge == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      auto out = graph.out(v);
      while (f.edge < out.size()) {
        PointId w = out[f.edge++];
        if (index[w] == kUnset) {
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        ++components;
        PointId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
        } while (w != v);
      }
      frames.pop_back();
      if (!frames.empty()) {
        PointId parent = frames.back().node;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }
  return components;
}

}  // namespace

GraphReport graph_report(const DirectedGraph& graph, const Dataset& data,
                         std::optional<PointId> navigating_node, int threads) {
  const std::uint32_t n = graph.size();
  if (n != data.size()) throw UsageError("graph_report: graph and dataset sizes differ");

  GraphReport report;
  report.n = n;
  report.aod = graph.avg_out_degree();
  report.mod = graph.max_out_degree();

  std::vector<PointId> nn = exact_nearest(data, threads);
  std::uint32_t linked = 0;
  for (PointId p = 0; p < n; ++p) {
    auto row = graph.out(p);
    if (std::find(row.begin(), row.end(), nn[p]) != row.end()) ++linked;
  }
  report.nn_percent = n ? double(linked) / n : 0.0;
  report.scc_count = scc_count(graph);

  if (navigating_node) {
    if (*navigating_node >= n) throw UsageError("graph_report: navigating node out of range");
    report.has_nav = true;
    report.navigating_node = *navigating_node;
    report.reachable_from_nav = count_reachable(graph, *navigating_node);
  }
  return report;
}

void write_graph_report_csv(std::ostream& out, const GraphReport& report) {
  char line[256];
  out << "n,aod,mod,nn_percent,scc_count,navigating_node,reachable_from_nav\n";
  std::snprintf(line, sizeof(line), "%u,%.6f,%u,%.6f,%u,", report.n, report.aod, report.mod,
                report.nn_percent, report.scc_count);
  out << line;
  if (report.has_nav) {
    std::snprintf(line, sizeof(line), "%u,%u\n", report.navigating_node, report.reachable_from_nav);
    out << line;
  } else {
    out << ",\n";
  }
}

MsnetCheck check_msnet(const DirectedGraph& graph, const Dataset& data, int threads) {
  const std::uint32_t n = graph.size();
  if (n != data.size()) throw UsageError("check_msnet: graph and dataset sizes differ");

  // Per-source first failure, then the smallest (p, q) wins; the result is
  // deterministic for any thread count.
  std::vector<PointId> fail_q(n, kNoNavigatingNode), fail_stuck(n, 0);
  parallel_for(0, n, threads, [&](std::uint32_t p) {
    for (PointId q = 0; q < n; ++q) {
      if (q == p) continue;
      GreedyWalkResult walk = greedy_walk(graph, data, q, p);
      if (!walk.reached) {
        fail_q[p] = q;
        fail_stuck[p] = walk.path.back();
        return;
      }
    }
  });

  MsnetCheck check;
  for (PointId p = 0; p < n; ++p) {
    if (fail_q[p] != kNoNavigatingNode) {
      check.holds = false;
      check.p = p;
      check.q = fail_q[p];
      check.stuck = fail_stuck[p];
      return check;
    }
  }
  return check;
}

double min_pairwise_edge_angle(const DirectedGraph& graph, const Dataset& data) {
  const std::uint32_t n = graph.size();
  if (n != data.size()) throw UsageError("min_pairwise_edge_angle: sizes differ");
  const std::uint32_t d = data.dim();
  const double pi = 3.14159265358979323846;

  double min_angle = pi;
  bool any = false;
  std::vector<double> u(d), v(d);
  for (PointId p = 0; p < n; ++p) {
    auto row = graph.out(p);
    const float* pp = data.point_ptr(p);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const float* a = data.point_ptr(row[i]);
      double norm_u = 0.0;
      for (std::uint32_t t = 0; t < d; ++t) {
        u[t] = double(a[t]) - double(pp[t]);
        norm_u += u[t] * u[t];
      }
      if (norm_u == 0.0) continue;  // duplicate coordinates carry no direction
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        const float* b = data.point_ptr(row[j]);
        double norm_v = 0.0, dot = 0.0;
        for (std::uint32_t t = 0; t < d; ++t) {
          v[t] = double(b[t]) - double(pp[t]);
          norm_v += v[t] * v[t];
          dot += u[t] * v[t];
        }
        if (norm_v == 0.0) continue;
        double c = dot / std::sqrt(norm_u * norm_v);
        c = std::clamp(c, -1.0, 1.0);
        double angle = std::acos(c);
        if (!any || angle < min_angle) {
          min_angle = angle;
          any = true;
        }
      }
    }
  }
  return any ? min_angle : pi;
}

double estimate_delta_r(const Dataset& data, int threads, bool allow_large) {
  const std::uint32_t n = data.size();
  if (n < 3) throw UsageError("estimate_delta_r requires n >= 3");
  if (n > 2000 && !allow_large)
    throw UsageError("estimate_delta_r: n > 2000 is an O(n^3) run; pass allow_large");
  const std::uint32_t d = data.dim();

  // True distances, float32 like the rest of the metric.
  std::vector<float> dist(std::size_t(n) * n);
  parallel_for(0, n, threads, [&](std::uint32_t i) {
    for (PointId j = 0; j < n; ++j)
      dist[std::size_t(i) * n + j] = std::sqrt(l2_sq(data.point_ptr(i), data.point_ptr(j), d));
  });

  std::vector<double> local_min(n, std::numeric_limits<double>::infinity());
  parallel_for(0, n, threads, [&](std::uint32_t i) {
    double best = std::numeric_limits<double>::infinity();
    const float* di = dist.data() + std::size_t(i) * n;
    for (PointId j = i + 1; j < n; ++j) {
      const float a = di[j];
      if (a == 0.0f) continue;
      const float* dj = dist.data() + std::size_t(j) * n;
      for (PointId k = j + 1; k < n; ++k) {
        const float b = di[k];
        const float c = dj[k];
        if (b == 0.0f || c == 0.0f) continue;      // duplicate-involving triple
        if (a == b || a == c || b == c) continue;  // exactly isosceles
        float m = std::fabs(a - b);
        float m2 = std::fabs(a - c);
        if (m2 < m) m = m2;
        float m3 = std::fabs(b - c);
        if (m3 < m) m = m3;
        if (m < best) best = m;
      }
    }
    local_min[i] = best;
  });
  double result = std::numeric_limits<double>::infinity();
  for (double v : local_min) result = std::min(result, v);
  return result;
}

std::vector<HopScalingRow> hop_scaling_experiment(const Dataset& base,
                                                  std::span<const std::uint32_t> sizes,
                                                  const Dataset& queries, std::uint32_t K,
                                                  double target_precision,
                                                  const HopScalingRecipe& recipe,
                                                  std::span<const std::uint32_t> l_sweep) {
  if (sizes.empty()) throw UsageError("hop_scaling_experiment: no sizes");
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw UsageError("hop_scaling_experiment: sizes must ascend");
  if (sizes.back() > base.size()) throw UsageError("hop_scaling_experiment: size exceeds dataset");
  if (l_sweep.empty()) throw UsageError("hop_scaling_experiment: empty l sweep");
  for (std::uint32_t l : l_sweep) {
    if (l < K) throw UsageError("hop_scaling_experiment: every l must be >= K");
  }

  std::vector<HopScalingRow> rows;
  for (std::uint32_t n : sizes) {
    Dataset sub = base.prefix(n);
    GroundTruth truth = compute_ground_truth(sub, queries, K, recipe.threads);

    KnnGraph knn;
    if (n <= recipe.exact_knn_threshold) {
      knn = exact_knn_graph(sub, recipe.k, recipe.threads);
    } else {
      NnDescentParams nd;
      nd.k = recipe.k;
      nd.sample_rate = 0.5;
      nd.seed = recipe.seed;
      nd.threads = recipe.threads;
      knn = nn_descent(sub, nd);
    }
    NsgBuildParams bp;
    bp.l_build = recipe.l_build;
    bp.m = recipe.m;
    bp.seed = recipe.seed;
    bp.threads = recipe.threads;
    NsgIndex index = build_nsg(knn, sub, bp);

    HopScalingRow row;
    row.n = n;
    for (std::uint32_t l : l_sweep) {
      double precision_sum = 0.0, hops_sum = 0.0, dc_sum = 0.0;
      std::vector<PointId> ids;
      std::vector<PointId> truth_ids;
      for (std::uint32_t qi = 0; qi < queries.size(); ++qi) {
        SearchStats stats = search_nsg(index, sub, queries.point(qi), l, K);
        ids.clear();
        for (const Neighbor& nb : stats.results) ids.push_back(nb.id);
        truth_ids.clear();
        for (const Neighbor& nb : truth.row(qi)) truth_ids.push_back(nb.id);
        precision_sum += precision_at_k(ids, truth_ids);
        hops_sum += double(stats.hops);
        dc_sum += double(stats.distance_computations);
      }
      row.l = l;
      row.precision = precision_sum / queries.size();
      row.mean_hops = hops_sum / queries.size();
      row.mean_distance_computations = dc_sum / queries.size();
      row.feasible = row.precision >= target_precision;
      if (row.feasible) break;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_hop_scaling_csv(std::ostream& out, std::span<const HopScalingRow> rows) {
  out << "n,l,precision,mean_hops,mean_distance_computations,feasible\n";
  char line[256];
  for (const HopScalingRow& r : rows) {
    std::snprintf(line, sizeof(line), "%u,%u,%.6f,%.6f,%.6f,%d\n", r.n, r.l, r.precision,
                  r.mean_hops, r.mean_distance_computations, r.feasible ? 1 : 0);
    out << line;
  }
}

}  // namespace nsglib
