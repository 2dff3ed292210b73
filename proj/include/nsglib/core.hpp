#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsglib {

using PointId = std::uint32_t;

// Stored in index files for graphs that have no navigating node (kNN graph,
// MRNG, RNG).
inline constexpr PointId kNoNavigatingNode = 0xFFFFFFFFu;

// Bad parameters or shape mismatches. Maps to exit code 2 in the CLI.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or corrupted files. Maps to exit code 3 in the CLI.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation that completed but produced no feasible result (e.g. a grid
// search where no combination reaches the target). Maps to exit code 4.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Candidate-pool entry. Inside the library `distance` always holds a squared
// l2 value; true distances appear only at file and report boundaries. The
// ordering is total, so every comparison made on squared values matches the
// one made on true values.
struct Neighbor {
  PointId id = 0;
  float distance = 0.0f;
  bool checked = false;

  Neighbor() = default;
  Neighbor(PointId i, float d, bool c = false) : id(i), distance(d), checked(c) {}
};

// Ascending (distance, id). The id tie-break keeps every ordering decision
// deterministic, including between duplicate points.
inline bool operator<(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.id < b.id;
}

inline bool operator==(const Neighbor& a, const Neighbor& b) {
  return a.id == b.id && a.distance == b.distance;
}

// n points of dimension d in one contiguous float32 buffer. Immutable after
// construction and safe to share across threads.
class Dataset {
 public:
  Dataset() = default;

  // Validates n >= 1, d >= 1, data.size() == n*d and that every value is
  // finite. Throws UsageError otherwise.
  Dataset(std::vector<float> data, std::uint32_t n, std::uint32_t d);

  std::uint32_t size() const { return n_; }
  std::uint32_t dim() const { return d_; }

  const float* point_ptr(PointId i) const {
    assert(i < n_);
    return data_.data() + std::size_t(i) * d_;
  }
  std::span<const float> point(PointId i) const { return {point_ptr(i), d_}; }
  std::span<const float> raw() const { return {data_.data(), data_.size()}; }

  // FNV-1a over the raw bytes; identifies which dataset an index was built on.
  std::uint64_t fingerprint() const;

  // Copy of the first m points.
  Dataset prefix(std::uint32_t m) const;

 private:
  std::vector<float> data_;
  std::uint32_t n_ = 0;
  std::uint32_t d_ = 0;
};

// Points that are bit-identical to an earlier point. Duplicates are legal but
// worth flagging: graph builders fall back to id tie-breaks on them.
std::uint32_t count_duplicate_points(const Dataset& data);

// Squared l2 without dimension checks; the hot path for points of one dataset.
// Accumulates in float32, matching the documented metric tolerance.
inline float l2_sq(const float* a, const float* b, std::uint32_t d) {
  float acc = 0.0f;
  for (std::uint32_t i = 0; i < d; ++i) {
    float diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

// Checked variants. Throw UsageError on dimension mismatch.
float l2_distance_sq(std::span<const float> a, std::span<const float> b);
float l2_distance(std::span<const float> a, std::span<const float> b);

// Per-node out-edge lists. Holds kNN graphs, RNG, MRNG, and NSG structure.
// Immutable after its builder finishes; builders own the only mutable ref.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(std::uint32_t n) : rows_(n) {}

  std::uint32_t size() const { return static_cast<std::uint32_t>(rows_.size()); }

  std::span<const PointId> out(PointId p) const {
    assert(p < size());
    return {rows_[p].data(), rows_[p].size()};
  }

  std::vector<PointId>& row(PointId p) {
    assert(p < size());
    return rows_[p];
  }

  const std::vector<std::vector<PointId>>& rows() const { return rows_; }

  std::uint32_t max_out_degree() const;
  double avg_out_degree() const;
  std::uint64_t edge_count() const;

  // Enforces: no self-loops, no duplicate out-neighbor per row, all ids < n.
  void validate() const;

  bool operator==(const DirectedGraph& other) const { return rows_ == other.rows_; }

  // Set by builders to the true maximum out-degree once construction (and any
  // repair) has finished.
  std::optional<std::uint32_t> declared_max_out_degree;

 private:
  std::vector<std::vector<PointId>> rows_;
};

}  // namespace nsglib
