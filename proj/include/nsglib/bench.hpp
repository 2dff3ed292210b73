#pragma once

#include <filesystem>
#include <iosfwd>

#include "nsglib/core.hpp"
#include "nsglib/nsg.hpp"

namespace nsglib {

// Exact top-K per query, fixed K, rows sorted ascending by (distance, id).
// Distances are squared in memory; the fvecs writer emits true distances.
struct GroundTruth {
  std::uint32_t query_count = 0;
  std::uint32_t K = 0;
  std::vector<Neighbor> flat;  // query_count * K

  std::span<const Neighbor> row(std::uint32_t q) const {
    assert(q < query_count);
    return {flat.data() + std::size_t(q) * K, K};
  }
};

GroundTruth compute_ground_truth(const Dataset& base, const Dataset& queries,
                                 std::uint32_t K, int threads = 1);

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& ids_path,
                        const std::filesystem::path& distances_path);

// |result ids intersect truth ids| / K. Both spans must have equal positive
// size; order within each is irrelevant.
double precision_at_k(std::span<const PointId> result_ids, std::span<const PointId> truth_ids);

struct RecallCurvePoint {
  std::uint32_t l = 0;
  double precision = 0.0;
  double qps = 0.0;       // median of the timed repetitions
  double qps_mean = 0.0;
  double mean_distance_computations = 0.0;
  double mean_hops = 0.0;
};

// One point per l: run every query single-threaded, timing only the search
// calls (repeated `repetitions` times for the QPS columns; result columns come
// from the first pass and are deterministic). l_values must be ascending and
// >= K.
std::vector<RecallCurvePoint> run_sweep(const NsgIndex& index, const Dataset& base,
                                        const Dataset& queries, const GroundTruth& truth,
                                        std::span<const std::uint32_t> l_values, std::uint32_t K,
                                        int repetitions = 3);

void write_sweep_csv(std::ostream& out, std::span<const RecallCurvePoint> points);

struct GridPoint {
  std::uint32_t k = 0;
  std::uint32_t l_build = 0;
  std::uint32_t m = 0;
};

struct GridSearchResult {
  bool feasible = false;
  GridPoint best;
  std::uint32_t best_l = 0;        // smallest l meeting the target for the winner
  double best_precision = 0.0;
  double best_mean_dc = 0.0;       // ranking key: deterministic proxy for QPS
  double best_qps = 0.0;           // measured, reported only
};

// Builds one index per (k, l_build, m) combination on the sample and keeps the
// combination with the fewest mean distance computations at the smallest l
// reaching the target precision. Distance computations stand in for QPS so the
// selection is deterministic; measured QPS is reported alongside. Ties fall to
// grid order (k outermost, m innermost).
GridSearchResult grid_search(const Dataset& sample, std::span<const std::uint32_t> k_grid,
                             std::span<const std::uint32_t> l_build_grid,
                             std::span<const std::uint32_t> m_grid, const Dataset& queries,
                             std::uint32_t K, double target_precision,
                             std::span<const std::uint32_t> l_values, std::uint64_t seed,
                             int threads = 1);

// One shard of a partitioned dataset; ids are shard-local and offset into the
// global id space.
struct Shard {
  const NsgIndex* index = nullptr;
  const Dataset* data = nullptr;
  std::uint32_t id_offset = 0;
};

// Searches every shard and merges by (distance, global id) into a global
// top-K. Shards may be searched concurrently; the merge is deterministic.
// Throws UsageError on overlapping id ranges.
std::vector<Neighbor> sharded_search(std::span<const Shard> shards, std::span<const float> query,
                                     std::uint32_t l, std::uint32_t K, int threads = 1);

}  // namespace nsglib
