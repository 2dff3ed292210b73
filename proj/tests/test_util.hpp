#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nsglib/core.hpp"

namespace testutil {

// Test-local generator, independent of the library's synthetic data path.
inline nsglib::Dataset random_dataset(std::uint32_t n, std::uint32_t d, std::uint64_t seed,
                                      float lo = 0.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> values(std::size_t(n) * d);
  for (float& v : values) v = dist(rng);
  return nsglib::Dataset(std::move(values), n, d);
}

inline nsglib::Dataset make_dataset(std::vector<float> values, std::uint32_t n, std::uint32_t d) {
  return nsglib::Dataset(std::move(values), n, d);
}

// 1-d points, one coordinate per point.
inline nsglib::Dataset line_dataset(std::vector<float> xs) {
  std::uint32_t n = static_cast<std::uint32_t>(xs.size());
  return nsglib::Dataset(std::move(xs), n, 1);
}

// Double-precision l2; the reference oracle for every float32 distance check.
inline double l2_ref(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = double(a[i]) - double(b[i]);
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

// Brute-force top-k in double precision, ties by id. Independent of the
// library's metric and sort paths.
inline std::vector<nsglib::PointId> brute_force_knn_ids(const nsglib::Dataset& data,
                                                        std::span<const float> query,
                                                        std::uint32_t k,
                                                        std::int64_t exclude = -1) {
  struct Entry {
    double dist;
    nsglib::PointId id;
  };
  std::vector<Entry> all;
  for (nsglib::PointId p = 0; p < data.size(); ++p) {
    if (exclude >= 0 && p == nsglib::PointId(exclude)) continue;
    all.push_back({l2_ref(data.point(p), query), p});
  }
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.id < b.id;
  });
  std::vector<nsglib::PointId> ids;
  for (std::uint32_t i = 0; i < k && i < all.size(); ++i) ids.push_back(all[i].id);
  return ids;
}

// Near-collinear 2-d chain whose RNG has no monotonic path from the second
// point to the last one: the only RNG edge out of `p` leads away from `q`.
// Order: r, p, s, t, u, q.
inline nsglib::Dataset detour_chain_dataset() {
  std::vector<float> pts = {
      -0.6f, 0.8f,   // r: p's lone RNG neighbor, farther from q than p
      0.0f,  0.0f,   // p
      0.9f,  1.7f,   // s
      2.6f,  2.2f,   // t
      5.0f,  2.4f,   // u
      10.0f, 0.0f,   // q
  };
  return nsglib::Dataset(std::move(pts), 6, 2);
}

inline std::vector<nsglib::PointId> row_of(const nsglib::DirectedGraph& g, nsglib::PointId p) {
  auto out = g.out(p);
  return {out.begin(), out.end()};
}

inline std::vector<nsglib::PointId> ids_of(std::span<const nsglib::Neighbor> neighbors) {
  std::vector<nsglib::PointId> ids;
  ids.reserve(neighbors.size());
  for (const auto& nb : neighbors) ids.push_back(nb.id);
  return ids;
}

}  // namespace testutil
