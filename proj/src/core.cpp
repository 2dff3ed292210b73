#include "nsglib/core.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_set>

namespace nsglib {

Dataset::Dataset(std::vector<float> data, std::uint32_t n, std::uint32_t d)
    : data_(std::move(data)), n_(n), d_(d) {
  if (n_ < 1 || d_ < 1) throw UsageError("dataset requires n >= 1 and d >= 1");
  if (data_.size() != std::size_t(n_) * d_)
    throw UsageError("dataset buffer size does not equal n * d");
  for (float v : data_) {
    if (!std::isfinite(v)) throw UsageError("dataset contains a non-finite value");
  }
}

std::uint64_t Dataset::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data_.data());
  std::size_t len = data_.size() * sizeof(float);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

Dataset Dataset::prefix(std::uint32_t m) const {
  if (m < 1 || m > n_) throw UsageError("prefix size out of range");
  std::vector<float> sub(data_.begin(), data_.begin() + std::size_t(m) * d_);
  return Dataset(std::move(sub), m, d_);
}

std::uint32_t count_duplicate_points(const Dataset& data) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(data.size());
  std::uint32_t dups = 0;
  std::size_t row_bytes = std::size_t(data.dim()) * sizeof(float);
  for (PointId i = 0; i < data.size(); ++i) {
    std::string_view row(reinterpret_cast<const char*>(data.point_ptr(i)), row_bytes);
    if (!seen.insert(row).second) ++dups;
  }
  return dups;
}

float l2_distance_sq(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw UsageError("l2 distance: dimension mismatch");
  return l2_sq(a.data(), b.data(), static_cast<std::uint32_t>(a.size()));
}

float l2_distance(std::span<const float> a, std::span<const float> b) {
  return std::sqrt(l2_distance_sq(a, b));
}

std::uint32_t DirectedGraph::max_out_degree() const {
  std::size_t m = 0;
  for (const auto& r : rows_) m = std::max(m, r.size());
  return static_cast<std::uint32_t>(m);
}

double DirectedGraph::avg_out_degree() const {
  if (rows_.empty()) return 0.0;
  return double(edge_count()) / double(rows_.size());
}

std::uint64_t DirectedGraph::edge_count() const {
  std::uint64_t total = 0;
  for (const auto& r : rows_) total += r.size();
  return total;
}

void DirectedGraph::validate() const {
  const std::uint32_t n = size();
  std::vector<PointId> scratch;
  for (PointId p = 0; p < n; ++p) {
    for (PointId q : rows_[p]) {
      if (q >= n) throw UsageError("graph edge references id out of range");
      if (q == p) throw UsageError("graph contains a self-loop");
    }
    scratch.assign(rows_[p].begin(), rows_[p].end());
    std::sort(scratch.begin(), scratch.end());
    if (std::adjacent_find(scratch.begin(), scratch.end()) != scratch.end())
      throw UsageError("graph row contains a duplicate out-neighbor");
  }
}

}  // namespace nsglib
