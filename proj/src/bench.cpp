#include "nsglib/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <ostream>

#include "nsglib/io.hpp"
#include "nsglib/knn.hpp"
#include "nsglib/parallel.hpp"
#include "nsglib/search.hpp"

namespace nsglib {

GroundTruth compute_ground_truth(const Dataset& base, const Dataset& queries, std::uint32_t K,
                                 int threads) {
  if (base.dim() != queries.dim()) throw UsageError("ground truth: dimension mismatch");
  if (K < 1 || K >= base.size()) throw UsageError("ground truth: require 1 <= K < n");

  GroundTruth truth;
  truth.query_count = queries.size();
  truth.K = K;
  truth.flat.resize(std::size_t(queries.size()) * K);
  const std::uint32_t n = base.size();
  const std::uint32_t d = base.dim();
  parallel_blocks(0, queries.size(), threads, [&](std::uint32_t lo, std::uint32_t hi) {
    std::vector<Neighbor> all(n);
    for (std::uint32_t qi = lo; qi < hi; ++qi) {
      const float* qp = queries.point_ptr(qi);
      for (PointId p = 0; p < n; ++p) all[p] = Neighbor(p, l2_sq(qp, base.point_ptr(p), d));
      std::partial_sort(all.begin(), all.begin() + K, all.end());
      std::copy(all.begin(), all.begin() + K, truth.flat.begin() + std::size_t(qi) * K);
    }
  });
  return truth;
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& ids_path,
                        const std::filesystem::path& distances_path) {
  std::vector<std::vector<std::int32_t>> ids(truth.query_count);
  std::vector<float> dists(std::size_t(truth.query_count) * truth.K);
  for (std::uint32_t qi = 0; qi < truth.query_count; ++qi) {
    auto row = truth.row(qi);
    ids[qi].reserve(truth.K);
    for (std::uint32_t j = 0; j < truth.K; ++j) {
      ids[qi].push_back(static_cast<std::int32_t>(row[j].id));
      dists[std::size_t(qi) * truth.K + j] = std::sqrt(row[j].distance);  // true l2 on disk
    }
  }
  write_ivecs(ids, ids_path);
  write_fvecs(Dataset(std::move(dists), truth.query_count, truth.K), distances_path);
}

double precision_at_k(std::span<const PointId> result_ids, std::span<const PointId> truth_ids) {
  if (result_ids.empty() || result_ids.size() != truth_ids.size())
    throw UsageError("precision_at_k: id lists must have equal positive size");
  std::vector<PointId> a(result_ids.begin(), result_ids.end());
  std::vector<PointId> b(truth_ids.begin(), truth_ids.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t hits = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++hits;
      ++i;
      ++j;
    }
  }
  return double(hits) / double(result_ids.size());
}

std::vector<RecallCurvePoint> run_sweep(const NsgIndex& index, const Dataset& base,
                                        const Dataset& queries, const GroundTruth& truth,
                                        std::span<const std::uint32_t> l_values, std::uint32_t K,
                                        int repetitions) {
  if (l_values.empty()) throw UsageError("run_sweep: no l values");
  if (!std::is_sorted(l_values.begin(), l_values.end()))
    throw UsageError("run_sweep: l values must ascend");
  for (std::uint32_t l : l_values) {
    if (l < K) throw UsageError("run_sweep: every l must be >= K");
  }
  if (truth.query_count != queries.size() || truth.K < K)
    throw UsageError("run_sweep: ground truth does not match the query set");
  if (repetitions < 1) throw UsageError("run_sweep: repetitions must be >= 1");

  std::vector<RecallCurvePoint> points;
  std::vector<PointId> ids, truth_ids;
  double prev_precision = -1.0;
  for (std::uint32_t l : l_values) {
    RecallCurvePoint point;
    point.l = l;

    double precision_sum = 0.0, hops_sum = 0.0, dc_sum = 0.0;
    std::vector<double> elapsed(repetitions, 0.0);
    for (int rep = 0; rep < repetitions; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      for (std::uint32_t qi = 0; qi < queries.size(); ++qi) {
        SearchStats stats = search_nsg(index, base, queries.point(qi), l, K);
        if (rep == 0) {
          ids.clear();
          for (const Neighbor& nb : stats.results) ids.push_back(nb.id);
          truth_ids.clear();
          auto row = truth.row(qi);
          for (std::uint32_t j = 0; j < K; ++j) truth_ids.push_back(row[j].id);
          precision_sum += precision_at_k(ids, truth_ids);
          hops_sum += double(stats.hops);
          dc_sum += double(stats.distance_computations);
        }
      }
      elapsed[rep] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    point.precision = precision_sum / queries.size();
    point.mean_hops = hops_sum / queries.size();
    point.mean_distance_computations = dc_sum / queries.size();
    std::vector<double> sorted_elapsed = elapsed;
    std::sort(sorted_elapsed.begin(), sorted_elapsed.end());
    double median = sorted_elapsed[sorted_elapsed.size() / 2];
    double mean = 0.0;
    for (double e : elapsed) mean += e;
    mean /= elapsed.size();
    point.qps = median > 0 ? queries.size() / median : 0.0;
    point.qps_mean = mean > 0 ? queries.size() / mean : 0.0;

    if (prev_precision >= 0.0 && point.precision < prev_precision) {
      std::cerr << "note: precision dipped from " << prev_precision << " to " << point.precision
                << " at l=" << l << "\n";
    }
    prev_precision = point.precision;
    points.push_back(point);
  }
  return points;
}

void write_sweep_csv(std::ostream& out, std::span<const RecallCurvePoint> points) {
  out << "l,precision,qps,qps_mean,mean_distance_computations,mean_hops\n";
  char line[256];
  for (const RecallCurvePoint& p : points) {
    std::snprintf(line, sizeof(line), "%u,%.6f,%.2f,%.2f,%.6f,%.6f\n", p.l, p.precision, p.qps,
                  p.qps_mean, p.mean_distance_computations, p.mean_hops);
    out << line;
  }
}

GridSearchResult grid_search(const Dataset& sample, std::span<const std::uint32_t> k_grid,
                             std::span<const std::uint32_t> l_build_grid,
                             std::span<const std::uint32_t> m_grid, const Dataset& queries,
                             std::uint32_t K, double target_precision,
                             std::span<const std::uint32_t> l_values, std::uint64_t seed,
                             int threads) {
  if (k_grid.empty() || l_build_grid.empty() || m_grid.empty())
    throw UsageError("grid_search: empty grid");

  GroundTruth truth = compute_ground_truth(sample, queries, K, threads);
  GridSearchResult result;
  for (std::uint32_t k : k_grid) {
    KnnGraph knn;
    if (sample.size() <= 10000) {
      knn = exact_knn_graph(sample, k, threads);
    } else {
      NnDescentParams nd;
      nd.k = k;
      nd.sample_rate = 0.5;
      nd.seed = seed;
      nd.threads = threads;
      knn = nn_descent(sample, nd);
    }
    for (std::uint32_t l_build : l_build_grid) {
      for (std::uint32_t m : m_grid) {
        NsgBuildParams bp;
        bp.l_build = l_build;
        bp.m = m;
        bp.seed = seed;
        bp.threads = threads;
        NsgIndex index = build_nsg(knn, sample, bp);
        std::vector<RecallCurvePoint> sweep = run_sweep(index, sample, queries, truth, l_values, K, 1);
        for (const RecallCurvePoint& point : sweep) {
          if (point.precision < target_precision) continue;
          // Deterministic ranking: fewest distance computations at the
          // smallest feasible l. Strict < keeps ties on grid order.
          if (!result.feasible || point.mean_distance_computations < result.best_mean_dc) {
            result.feasible = true;
            result.best = GridPoint{k, l_build, m};
            result.best_l = point.l;
            result.best_precision = point.precision;
            result.best_mean_dc = point.mean_distance_computations;
            result.best_qps = point.qps;
          }
          break;
        }
      }
    }
  }
  return result;
}

std::vector<Neighbor> sharded_search(std::span<const Shard> shards, std::span<const float> query,
                                     std::uint32_t l, std::uint32_t K, int threads) {
  if (shards.empty()) throw UsageError("sharded_search: no shards");
  for (const Shard& s : shards) {
    if (!s.index || !s.data) throw UsageError("sharded_search: incomplete shard");
  }
  // Offset ranges must not overlap.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  for (const Shard& s : shards)
    ranges.emplace_back(s.id_offset, std::uint64_t(s.id_offset) + s.data->size());
  std::sort(ranges.begin(), ranges.end());
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].first < ranges[i - 1].second)
      throw UsageError("sharded_search: overlapping shard id ranges");
  }

  std::vector<std::vector<Neighbor>> per_shard(shards.size());
  parallel_for(0, static_cast<std::uint32_t>(shards.size()), threads, [&](std::uint32_t si) {
    const Shard& s = shards[si];
    std::uint32_t k_local = std::min(K, s.data->size());
    std::uint32_t l_local = std::max(l, k_local);
    SearchStats stats = search_nsg(*s.index, *s.data, query, l_local, k_local);
    per_shard[si] = std::move(stats.results);
    for (Neighbor& nb : per_shard[si]) nb.id += s.id_offset;
  });

  std::vector<Neighbor> merged;
  for (auto& part : per_shard) merged.insert(merged.end(), part.begin(), part.end());
  std::sort(merged.begin(), merged.end());
  if (merged.size() > K) merged.resize(K);
  return merged;
}

}  // namespace nsglib
