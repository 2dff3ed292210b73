#include "nsglib/knn.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "nsglib/parallel.hpp"

namespace nsglib {

DirectedGraph KnnGraph::to_graph() const {
  DirectedGraph g(n);
  for (PointId p = 0; p < n; ++p) {
    auto& r = g.row(p);
    r.reserve(k);
    for (const Neighbor& nb : row(p)) r.push_back(nb.id);
  }
  g.declared_max_out_degree = k;
  return g;
}

KnnGraph exact_knn_graph(const Dataset& data, std::uint32_t k, int threads) {
  const std::uint32_t n = data.size();
  if (k < 1 || k >= n) throw UsageError("exact_knn_graph requires 1 <= k < n");
  KnnGraph g;
  g.n = n;
  g.k = k;
  g.flat.resize(std::size_t(n) * k);
  const std::uint32_t d = data.dim();
  parallel_blocks(0, n, threads, [&](std::uint32_t lo, std::uint32_t hi) {
    std::vector<Neighbor> all;
    all.reserve(n - 1);
    for (PointId p = lo; p < hi; ++p) {
      all.clear();
      const float* pp = data.point_ptr(p);
      for (PointId q = 0; q < n; ++q) {
        if (q == p) continue;
        all.emplace_back(q, l2_sq(pp, data.point_ptr(q), d));
      }
      std::partial_sort(all.begin(), all.begin() + k, all.end());
      std::copy(all.begin(), all.begin() + k, g.flat.begin() + std::size_t(p) * k);
    }
  });
  return g;
}

double knn_graph_recall(const KnnGraph& approx, const KnnGraph& exact) {
  if (approx.n != exact.n || approx.k != exact.k)
    throw UsageError("knn_graph_recall: graphs differ in n or k");
  std::uint64_t hits = 0;
  std::vector<PointId> a, b;
  for (PointId p = 0; p < approx.n; ++p) {
    a.clear();
    b.clear();
    for (const Neighbor& nb : approx.row(p)) a.push_back(nb.id);
    for (const Neighbor& nb : exact.row(p)) b.push_back(nb.id);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<PointId> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    hits += common.size();
  }
  return double(hits) / (double(approx.n) * approx.k);
}

namespace {

struct PoolEntry {
  PointId id;
  float distance;
  bool is_new;
};

bool entry_less(const PoolEntry& a, const PoolEntry& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.id < b.id;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2);
  return a;
}

// Deterministic sample of `cap` positions out of [0, size) for (seed, iter, node).
void sample_positions(std::vector<std::uint32_t>& positions, std::uint32_t cap,
                      std::uint64_t seed, std::uint64_t iter, PointId node) {
  if (positions.size() <= cap) return;
  std::mt19937_64 rng(mix(mix(seed, iter), node));
  for (std::uint32_t i = 0; i < cap; ++i) {
    std::uint32_t j = i + static_cast<std::uint32_t>(rng() % (positions.size() - i));
    std::swap(positions[i], positions[j]);
  }
  positions.resize(cap);
  std::sort(positions.begin(), positions.end());
}

struct Update {
  PointId target;
  PointId candidate;
  float distance;
};

// Insert into a sorted fixed-size pool; returns true when the row changed.
bool pool_insert(PoolEntry* row, std::uint32_t k, PointId id, float distance) {
  PoolEntry cand{id, distance, true};
  if (!entry_less(cand, row[k - 1])) return false;
  std::uint32_t pos = k - 1;
  while (pos > 0 && entry_less(cand, row[pos - 1])) --pos;
  // Reject an id already present; it can only sit at or before `pos`.
  for (std::uint32_t i = 0; i <= pos && i < k; ++i) {
    if (row[i].id == id) return false;
  }
  for (std::uint32_t i = k - 1; i > pos; --i) row[i] = row[i - 1];
  row[pos] = cand;
  return true;
}

}  // namespace

KnnGraph nn_descent(const Dataset& data, const NnDescentParams& params,
                    const NnDescentObserver& observer) {
  const std::uint32_t n = data.size();
  const std::uint32_t k = params.k;
  const std::uint32_t d = data.dim();
  if (k < 1 || k >= n) throw UsageError("nn_descent requires 1 <= k < n");
  if (!(params.sample_rate > 0.0) || params.sample_rate > 1.0)
    throw UsageError("nn_descent requires 0 < sample_rate <= 1");
  const int threads = params.threads;

  std::vector<PoolEntry> pools(std::size_t(n) * k);
  auto pool_row = [&](PointId p) { return pools.data() + std::size_t(p) * k; };

  // Random distinct initialization, one rng per node.
  parallel_for(0, n, threads, [&](std::uint32_t v) {
    std::mt19937_64 rng(mix(params.seed, v));
    PoolEntry* row = pool_row(v);
    std::vector<PointId> chosen;
    chosen.reserve(k);
    while (chosen.size() < k) {
      PointId c = static_cast<PointId>(rng() % n);
      if (c == v || std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      chosen.push_back(c);
    }
    for (std::uint32_t i = 0; i < k; ++i)
      row[i] = PoolEntry{chosen[i], l2_sq(data.point_ptr(v), data.point_ptr(chosen[i]), d), true};
    std::sort(row, row + k, entry_less);
  });

  const std::uint32_t sample_cap =
      std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(params.sample_rate * k)));
  const double stop_below = params.convergence_threshold * double(n) * double(k);
  constexpr std::uint32_t kBlock = 1024;

  std::vector<std::vector<PointId>> fwd_new(n), fwd_old(n), join_new(n), join_old(n);
  std::vector<std::vector<PointId>> rev_new(n), rev_old(n);

  auto snapshot = [&]() {
    KnnGraph g;
    g.n = n;
    g.k = k;
    g.flat.resize(std::size_t(n) * k);
    for (std::size_t i = 0; i < pools.size(); ++i)
      g.flat[i] = Neighbor(pools[i].id, pools[i].distance, false);
    return g;
  };

  for (std::uint32_t iter = 1; iter <= params.max_iters; ++iter) {
    // Forward lists: sample up to sample_cap of each node's new entries (they
    // become old afterwards); old list is everything already joined before.
    parallel_for(0, n, threads, [&](std::uint32_t v) {
      PoolEntry* row = pool_row(v);
      auto& fnew = fwd_new[v];
      auto& fold = fwd_old[v];
      fnew.clear();
      fold.clear();
      std::vector<std::uint32_t> new_positions;
      for (std::uint32_t i = 0; i < k; ++i) {
        if (row[i].is_new) new_positions.push_back(i);
        else fold.push_back(row[i].id);
      }
      sample_positions(new_positions, sample_cap, params.seed, iter, v);
      for (std::uint32_t pos : new_positions) {
        fnew.push_back(row[pos].id);
        row[pos].is_new = false;
      }
    });

    // Reverse lists, built serially in node order so runs are reproducible.
    for (PointId v = 0; v < n; ++v) {
      rev_new[v].clear();
      rev_old[v].clear();
    }
    for (PointId v = 0; v < n; ++v) {
      for (PointId u : fwd_new[v]) rev_new[u].push_back(v);
      for (PointId u : fwd_old[v]) rev_old[u].push_back(v);
    }

    parallel_for(0, n, threads, [&](std::uint32_t v) {
      std::vector<std::uint32_t> positions(rev_new[v].size());
      std::iota(positions.begin(), positions.end(), 0);
      sample_positions(positions, sample_cap, params.seed ^ 0x5ca1ab1eull, iter, v);
      auto& jn = join_new[v];
      jn.assign(fwd_new[v].begin(), fwd_new[v].end());
      for (std::uint32_t pos : positions) jn.push_back(rev_new[v][pos]);
      std::sort(jn.begin(), jn.end());
      jn.erase(std::unique(jn.begin(), jn.end()), jn.end());

      positions.resize(rev_old[v].size());
      std::iota(positions.begin(), positions.end(), 0);
      sample_positions(positions, sample_cap, params.seed ^ 0xdecafbadull, iter, v);
      auto& jo = join_old[v];
      jo.assign(fwd_old[v].begin(), fwd_old[v].end());
      for (std::uint32_t pos : positions) jo.push_back(rev_old[v][pos]);
      std::sort(jo.begin(), jo.end());
      jo.erase(std::unique(jo.begin(), jo.end()), jo.end());
    });

    // Local join in fixed-size node blocks. The block partition is independent
    // of the thread count, and updates are applied per target in a fixed
    // order, so the outcome is the same in serial and parallel runs.
    std::uint64_t iter_updates = 0;
    std::vector<std::pair<PointId, PointId>> pairs;
    std::vector<float> pair_dist;
    std::vector<Update> updates, sorted_updates;
    std::vector<std::uint32_t> counts(n + 1);

    for (std::uint32_t lo = 0; lo < n; lo += kBlock) {
      const std::uint32_t hi = std::min(n, lo + kBlock);
      pairs.clear();
      for (PointId v = lo; v < hi; ++v) {
        const auto& jn = join_new[v];
        const auto& jo = join_old[v];
        for (std::size_t i = 0; i < jn.size(); ++i) {
          for (std::size_t j = i + 1; j < jn.size(); ++j) pairs.emplace_back(jn[i], jn[j]);
          for (PointId b : jo) {
            if (b != jn[i]) pairs.emplace_back(jn[i], b);
          }
        }
      }

      pair_dist.resize(pairs.size());
      parallel_for(0, static_cast<std::uint32_t>(pairs.size()), threads, [&](std::uint32_t i) {
        pair_dist[i] = l2_sq(data.point_ptr(pairs[i].first), data.point_ptr(pairs[i].second), d);
      });

      updates.clear();
      updates.reserve(pairs.size() * 2);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        updates.push_back(Update{pairs[i].first, pairs[i].second, pair_dist[i]});
        updates.push_back(Update{pairs[i].second, pairs[i].first, pair_dist[i]});
      }

      // Counting sort by target keeps the per-target arrival order stable.
      std::fill(counts.begin(), counts.end(), 0);
      for (const Update& u : updates) ++counts[u.target + 1];
      for (std::uint32_t t = 0; t < n; ++t) counts[t + 1] += counts[t];
      sorted_updates.resize(updates.size());
      {
        std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
        for (const Update& u : updates) sorted_updates[cursor[u.target]++] = u;
      }

      std::vector<std::uint64_t> block_updates(n, 0);
      parallel_for(0, n, threads, [&](std::uint32_t t) {
        PoolEntry* row = pool_row(t);
        for (std::uint32_t i = counts[t]; i < counts[t + 1]; ++i) {
          const Update& u = sorted_updates[i];
          if (pool_insert(row, k, u.candidate, u.distance)) ++block_updates[t];
        }
      });
      for (std::uint64_t c : block_updates) iter_updates += c;
    }

    if (observer) observer(iter, snapshot());
    if (double(iter_updates) < stop_below) break;
  }

  return snapshot();
}

}  // namespace nsglib
