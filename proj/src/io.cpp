#include "nsglib/io.hpp"

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "nsglib/nsg.hpp"

namespace nsglib {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

void put_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

float f32_from(const unsigned char* b) {
  std::uint32_t bits = get_u32(b);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  in.seekg(0, std::ios::end);
  auto len = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(len));
  if (len > 0) in.read(reinterpret_cast<char*>(bytes.data()), len);
  if (!in) throw FormatError("failed reading file: " + path.string());
  return bytes;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open file for writing: " + path.string());
  return out;
}

// Shared record walk for fvecs/ivecs: calls emit(element bytes) per element.
template <typename Emit>
std::pair<std::uint32_t, std::uint32_t> parse_vecs(const std::vector<unsigned char>& bytes,
                                                   const std::string& what, Emit&& emit) {
  if (bytes.empty()) throw FormatError(what + ": empty file");
  std::size_t pos = 0;
  std::uint32_t d = 0, count = 0;
  while (pos < bytes.size()) {
    if (pos + 4 > bytes.size()) throw FormatError(what + ": truncated record header");
    std::int32_t rec_d = static_cast<std::int32_t>(get_u32(bytes.data() + pos));
    pos += 4;
    if (rec_d < 1) throw FormatError(what + ": record declares non-positive dimension");
    if (count == 0) {
      d = static_cast<std::uint32_t>(rec_d);
    } else if (static_cast<std::uint32_t>(rec_d) != d) {
      throw FormatError(what + ": inconsistent dimension across records");
    }
    if (pos + std::size_t(d) * 4 > bytes.size()) throw FormatError(what + ": truncated record body");
    for (std::uint32_t i = 0; i < d; ++i, pos += 4) emit(bytes.data() + pos);
    ++count;
  }
  return {count, d};
}

}  // namespace

Dataset read_fvecs(const std::filesystem::path& path) {
  auto bytes = read_all(path);
  std::vector<float> values;
  auto [n, d] = parse_vecs(bytes, "fvecs " + path.string(), [&](const unsigned char* b) {
    float v = f32_from(b);
    if (!std::isfinite(v)) throw FormatError("fvecs " + path.string() + ": non-finite value");
    values.push_back(v);
  });
  return Dataset(std::move(values), n, d);
}

void write_fvecs(const Dataset& data, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (PointId i = 0; i < data.size(); ++i) {
    put_u32(out, data.dim());
    for (float v : data.point(i)) put_f32(out, v);
  }
  if (!out) throw FormatError("failed writing file: " + path.string());
}

std::vector<std::vector<std::int32_t>> read_ivecs(const std::filesystem::path& path) {
  auto bytes = read_all(path);
  std::vector<std::int32_t> values;
  auto [n, d] = parse_vecs(bytes, "ivecs " + path.string(), [&](const unsigned char* b) {
    values.push_back(static_cast<std::int32_t>(get_u32(b)));
  });
  std::vector<std::vector<std::int32_t>> rows(n);
  for (std::uint32_t i = 0; i < n; ++i)
    rows[i].assign(values.begin() + std::size_t(i) * d, values.begin() + std::size_t(i + 1) * d);
  return rows;
}

void write_ivecs(const std::vector<std::vector<std::int32_t>>& rows,
                 const std::filesystem::path& path) {
  if (rows.empty()) throw UsageError("write_ivecs: no rows");
  for (const auto& row : rows) {
    if (row.size() != rows.front().size())
      throw UsageError("write_ivecs: rows must share one dimension");
  }
  auto out = open_out(path);
  for (const auto& row : rows) {
    put_u32(out, static_cast<std::uint32_t>(row.size()));
    for (std::int32_t v : row) put_u32(out, static_cast<std::uint32_t>(v));
  }
  if (!out) throw FormatError("failed writing file: " + path.string());
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "uniform") return SyntheticKind::kUniform;
  if (s == "gaussian") return SyntheticKind::kGaussian;
  throw UsageError("unknown synthetic kind: " + s);
}

namespace {

// 24-bit mantissa draw in [0, 1).
float uniform_float(std::mt19937_64& rng) {
  return float(rng() >> 40) * 0x1.0p-24f;
}

// Box-Muller on explicit bit draws, so the stream is fixed by the seed alone.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = double((rng_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = double(rng_() >> 11) * 0x1.0p-53;        // [0, 1)
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.141592653589793 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace

Dataset generate_synthetic(SyntheticKind kind, std::uint32_t n, std::uint32_t d,
                           std::uint64_t seed, float gaussian_stddev) {
  if (n < 1 || d < 1) throw UsageError("generate_synthetic requires n >= 1 and d >= 1");
  std::vector<float> values(std::size_t(n) * d);
  if (kind == SyntheticKind::kUniform) {
    std::mt19937_64 rng(seed);
    for (float& v : values) v = uniform_float(rng);
  } else {
    GaussianSource src(seed);
    for (float& v : values) v = float(src.next()) * gaussian_stddev;
  }
  return Dataset(std::move(values), n, d);
}

void write_index_file(const DirectedGraph& graph, PointId navigating_node, std::uint32_t dim,
                      std::ostream& out) {
  const std::uint32_t n = graph.size();
  if (navigating_node != kNoNavigatingNode && navigating_node >= n)
    throw UsageError("navigating node out of range");
  out.write("NSG1", 4);
  put_u32(out, 1);  // format_version
  put_u32(out, n);
  put_u32(out, dim);
  put_u32(out, graph.max_out_degree());
  put_u32(out, navigating_node);
  for (PointId p = 0; p < n; ++p) {
    auto row = graph.out(p);
    put_u32(out, static_cast<std::uint32_t>(row.size()));
    for (PointId q : row) put_u32(out, q);
  }
  if (!out) throw FormatError("index write failed");
}

void write_index_file(const DirectedGraph& graph, PointId navigating_node, std::uint32_t dim,
                      const std::filesystem::path& path) {
  auto out = open_out(path);
  write_index_file(graph, navigating_node, dim, out);
}

namespace {

std::uint32_t stream_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError(std::string("index file truncated reading ") + what);
  return get_u32(b);
}

}  // namespace

GraphFile read_index_file(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "NSG1", 4) != 0) throw FormatError("index file: bad magic");
  std::uint32_t version = stream_u32(in, "version");
  if (version != 1) throw FormatError("index file: unsupported format version");
  std::uint32_t n = stream_u32(in, "n");
  std::uint32_t dim = stream_u32(in, "d");
  std::uint32_t declared_m = stream_u32(in, "max out-degree");
  PointId nav = stream_u32(in, "navigating node");
  if (nav != kNoNavigatingNode && nav >= n) throw FormatError("index file: navigating node out of range");

  GraphFile file;
  file.graph = DirectedGraph(n);
  file.navigating_node = nav;
  file.dim = dim;
  std::uint32_t true_m = 0;
  std::vector<char> seen(n, 0);
  for (PointId p = 0; p < n; ++p) {
    std::uint32_t degree = stream_u32(in, "row degree");
    if (degree > n) throw FormatError("index file: row degree exceeds node count");
    auto& row = file.graph.row(p);
    row.resize(degree);
    for (std::uint32_t i = 0; i < degree; ++i) {
      std::uint32_t id = stream_u32(in, "neighbor id");
      if (id >= n) throw FormatError("index file: neighbor id out of range");
      if (id == p) throw FormatError("index file: self-loop");
      if (seen[id]) throw FormatError("index file: duplicate neighbor in row");
      seen[id] = 1;
      row[i] = id;
    }
    for (PointId q : row) seen[q] = 0;
    true_m = std::max(true_m, degree);
  }
  if (true_m != declared_m) throw FormatError("index file: declared max out-degree mismatch");
  file.graph.declared_max_out_degree = declared_m;
  return file;
}

GraphFile read_index_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  return read_index_file(in);
}

void save_index(const NsgIndex& index, std::ostream& out) {
  write_index_file(index.graph, index.navigating_node, index.dim, out);
}

void save_index(const NsgIndex& index, const std::filesystem::path& path) {
  auto out = open_out(path);
  save_index(index, out);
}

NsgIndex load_index(std::istream& in) {
  GraphFile file = read_index_file(in);
  if (file.navigating_node == kNoNavigatingNode)
    throw FormatError("index file has no navigating node");
  NsgIndex index;
  index.graph = std::move(file.graph);
  index.navigating_node = file.navigating_node;
  index.dim = file.dim;
  return index;
}

NsgIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open file: " + path.string());
  return load_index(in);
}

}  // namespace nsglib
