#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsglib/core.hpp"

namespace nsglib {

struct NsgIndex;

// fvecs / ivecs: per record a little-endian i32 dimension, then that many
// little-endian float32 / i32 elements. Matches the layout the public SIFT1M
// and GIST1M ground-truth files ship in, so those load unmodified.
Dataset read_fvecs(const std::filesystem::path& path);
void write_fvecs(const Dataset& data, const std::filesystem::path& path);
std::vector<std::vector<std::int32_t>> read_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::vector<std::vector<std::int32_t>>& rows,
                 const std::filesystem::path& path);

enum class SyntheticKind { kUniform, kGaussian };

// "uniform" or "gaussian"; throws UsageError otherwise.
SyntheticKind synthetic_kind_from_string(const std::string& s);

// Deterministic for a fixed seed: uniform draws each coordinate from [0, 1),
// gaussian from a zero-mean normal with the given standard deviation
// (default 3, i.e. N(0,3) read as a standard deviation). Uses its own
// Box-Muller transform so the stream does not depend on the C++ runtime.
Dataset generate_synthetic(SyntheticKind kind, std::uint32_t n, std::uint32_t d,
                           std::uint64_t seed, float gaussian_stddev = 3.0f);

// Index file, format version 1. All fields little-endian:
//   magic "NSG1"
//   u32 format_version = 1
//   u32 n, u32 d, u32 max_out_degree, u32 navigating_node
//   n records: u32 out_degree k_i, then k_i u32 neighbor ids in adjacency order
// navigating_node is kNoNavigatingNode for graphs without one. max_out_degree
// must equal the true maximum out-degree of the stored rows.
struct GraphFile {
  DirectedGraph graph;
  PointId navigating_node = kNoNavigatingNode;
  std::uint32_t dim = 0;
};

void write_index_file(const DirectedGraph& graph, PointId navigating_node,
                      std::uint32_t dim, std::ostream& out);
void write_index_file(const DirectedGraph& graph, PointId navigating_node,
                      std::uint32_t dim, const std::filesystem::path& path);
GraphFile read_index_file(std::istream& in);
GraphFile read_index_file(const std::filesystem::path& path);

// NsgIndex wrappers over the same file format. load_index requires a valid
// navigating node (an NSG without one is corrupt).
void save_index(const NsgIndex& index, std::ostream& out);
void save_index(const NsgIndex& index, const std::filesystem::path& path);
NsgIndex load_index(std::istream& in);
NsgIndex load_index(const std::filesystem::path& path);

}  // namespace nsglib
