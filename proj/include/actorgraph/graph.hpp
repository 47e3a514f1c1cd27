#pragma once

// Graph ingestion and the compressed sparse row representation shared by
// every algorithm in the library.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace actorgraph {

using VertexId = std::uint32_t;
using EdgeIndex = std::uint64_t;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeList {
  std::vector<Edge> edges;
  std::optional<std::size_t> declared_vertices;

  /// Vertex count implied by the list: the declared count when present,
  /// otherwise max id + 1 (0 for an empty list).
  std::size_t num_vertices() const {
    if (declared_vertices) return *declared_vertices;
    std::size_t n = 0;
    for (const auto& e : edges) n = std::max<std::size_t>(n, std::max(e.src, e.dst) + std::size_t{1});
    return n;
  }
};

enum class EdgeFormat { Text, Binary };

inline EdgeFormat parse_edge_format(std::string_view name) {
  if (name == "text") return EdgeFormat::Text;
  if (name == "binary") return EdgeFormat::Binary;
  throw std::invalid_argument("unknown edge-list format '" + std::string(name) + "'");
}

/// Directed graph in CSR form. Targets within each source slice are sorted
/// ascending; duplicate edges are kept.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  Graph(std::vector<EdgeIndex> offsets, std::vector<VertexId> targets)
      : offsets_(std::move(offsets)), targets_(std::move(targets)) {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != targets_.size())
      throw std::invalid_argument("Graph: offsets do not frame the target array");
    const auto n = num_vertices();
    for (std::size_t v = 0; v < n; ++v) {
      if (offsets_[v] > offsets_[v + 1]) throw std::invalid_argument("Graph: offsets decrease");
      auto slice = neighbors(static_cast<VertexId>(v));
      if (!std::is_sorted(slice.begin(), slice.end()))
        throw std::invalid_argument("Graph: targets not sorted within a source");
      for (auto t : slice)
        if (t >= n) throw std::invalid_argument("Graph: target out of range");
    }
  }

  std::size_t num_vertices() const { return offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size(); }

  std::span<const EdgeIndex> offsets() const { return offsets_; }
  std::span<const VertexId> targets() const { return targets_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return std::span<const VertexId>(targets_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  std::size_t out_degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Calls fn(src, dst) for every edge in CSR order.
  template <class Fn>
  void for_each_edge(Fn&& fn) const {
    const auto n = num_vertices();
    for (std::size_t v = 0; v < n; ++v)
      for (auto e = offsets_[v]; e < offsets_[v + 1]; ++e) fn(static_cast<VertexId>(v), targets_[e]);
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for_each_edge([&](VertexId s, VertexId d) { out.push_back({s, d}); });
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<EdgeIndex> offsets_;
  std::vector<VertexId> targets_;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::string_view trim_left(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

// Parses one unsigned id at the start of `s`, advancing it. Returns false on
// a syntax error; throws RangeError when the id does not fit 32 bits.
inline bool take_id(std::string_view& s, VertexId& out, std::size_t line_no) {
  s = trim_left(s);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ptr == s.data()) return false;
  if (ec == std::errc::result_out_of_range || value > std::numeric_limits<VertexId>::max())
    throw RangeError("line " + std::to_string(line_no) + ": vertex id exceeds 32-bit range");
  if (ptr != s.data() + s.size() && !is_space(*ptr)) return false;
  out = static_cast<VertexId>(value);
  s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
  return true;
}

// SNAP headers carry "# Nodes: 4847571 Edges: 68993773".
inline std::optional<std::size_t> header_vertex_count(std::string_view comment) {
  constexpr std::string_view key = "Nodes:";
  auto pos = comment.find(key);
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = trim_left(comment.substr(pos + key.size()));
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
  if (ec != std::errc{} || ptr == rest.data()) return std::nullopt;
  return n;
}

inline void check_declared(const EdgeList& list) {
  if (!list.declared_vertices) return;
  for (std::size_t i = 0; i < list.edges.size(); ++i) {
    const auto& e = list.edges[i];
    if (e.src >= *list.declared_vertices || e.dst >= *list.declared_vertices)
      throw RangeError("edge " + std::to_string(i) + " (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                       ") exceeds declared vertex count " + std::to_string(*list.declared_vertices));
  }
}

}  // namespace detail

/// Parses a whitespace-separated edge list. Lines starting with '#' are
/// comments; blank lines are ignored.
inline EdgeList parse_text_edges(std::string_view text) {
  EdgeList list;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    auto body = detail::trim_left(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      if (!list.declared_vertices) list.declared_vertices = detail::header_vertex_count(body);
      continue;
    }
    Edge e;
    if (!detail::take_id(body, e.src, line_no) || !detail::take_id(body, e.dst, line_no) ||
        !detail::trim_left(body).empty())
      throw ParseError("line " + std::to_string(line_no) + ": expected '<src> <dst>', got '" + std::string(line) + "'");
    list.edges.push_back(e);
  }
  detail::check_declared(list);
  if (!list.declared_vertices) list.declared_vertices = list.num_vertices();
  return list;
}

/// Parses 8-byte records of (src, dst) as little-endian u32.
inline EdgeList parse_binary_edges(std::span<const unsigned char> bytes) {
  if (bytes.size() % 8 != 0)
    throw ParseError("byte " + std::to_string(bytes.size() - bytes.size() % 8) +
                     ": truncated record (file length " + std::to_string(bytes.size()) + " is not a multiple of 8)");
  auto u32 = [](const unsigned char* p) {
    return static_cast<VertexId>(p[0]) | static_cast<VertexId>(p[1]) << 8 | static_cast<VertexId>(p[2]) << 16 |
           static_cast<VertexId>(p[3]) << 24;
  };
  EdgeList list;
  list.edges.reserve(bytes.size() / 8);
  for (std::size_t off = 0; off < bytes.size(); off += 8) list.edges.push_back({u32(&bytes[off]), u32(&bytes[off + 4])});
  list.declared_vertices = list.num_vertices();
  return list;
}

inline std::vector<unsigned char> encode_binary_edges(std::span<const Edge> edges) {
  std::vector<unsigned char> out;
  out.reserve(edges.size() * 8);
  auto put = [&](VertexId v) {
    for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>(v >> s));
  };
  for (const auto& e : edges) {
    put(e.src);
    put(e.dst);
  }
  return out;
}

inline std::string encode_text_edges(const EdgeList& list) {
  std::string out;
  if (list.declared_vertices)
    out += "# Nodes: " + std::to_string(*list.declared_vertices) + " Edges: " + std::to_string(list.edges.size()) + "\n";
  for (const auto& e : list.edges) {
    out += std::to_string(e.src);
    out += ' ';
    out += std::to_string(e.dst);
    out += '\n';
  }
  return out;
}

inline EdgeList load_edge_list(const std::string& path, EdgeFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open edge list '" + path + "'");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == EdgeFormat::Text) return parse_text_edges(data);
  return parse_binary_edges(
      std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(data.data()), data.size()));
}

inline void save_edge_list(const std::string& path, const EdgeList& list, EdgeFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write edge list '" + path + "'");
  if (format == EdgeFormat::Text) {
    out << encode_text_edges(list);
  } else {
    auto bytes = encode_binary_edges(list.edges);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// Counting-sort the edges by source, then sort each slice.
inline Graph build_graph(const EdgeList& list) {
  const std::size_t n = list.num_vertices();
  std::vector<EdgeIndex> offsets(n + 1, 0);
  for (const auto& e : list.edges) {
    if (e.src >= n || e.dst >= n) throw RangeError("build_graph: edge endpoint exceeds vertex count");
    ++offsets[e.src + 1];
  }
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
  std::vector<VertexId> targets(list.edges.size());
  std::vector<EdgeIndex> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& e : list.edges) targets[cursor[e.src]++] = e.dst;
  for (std::size_t v = 0; v < n; ++v)
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(offsets[v]),
              targets.begin() + static_cast<std::ptrdiff_t>(offsets[v + 1]));
  return Graph(std::move(offsets), std::move(targets));
}

/// Undirected version: each distinct pair {u,v} appears as (u,v) and (v,u)
/// exactly once; self-loops appear once.
inline Graph symmetrize(const Graph& g) {
  EdgeList both;
  both.declared_vertices = g.num_vertices();
  both.edges.reserve(2 * g.num_edges());
  g.for_each_edge([&](VertexId s, VertexId d) {
    both.edges.push_back({s, d});
    both.edges.push_back({d, s});
  });
  Graph doubled = build_graph(both);

  const auto n = doubled.num_vertices();
  std::vector<EdgeIndex> offsets(n + 1, 0);
  std::vector<VertexId> targets;
  targets.reserve(doubled.num_edges());
  for (std::size_t v = 0; v < n; ++v) {
    auto nbrs = doubled.neighbors(static_cast<VertexId>(v));
    std::unique_copy(nbrs.begin(), nbrs.end(), std::back_inserter(targets));
    offsets[v + 1] = targets.size();
  }
  targets.shrink_to_fit();
  return Graph(std::move(offsets), std::move(targets));
}

inline std::vector<std::uint32_t> out_degrees(const Graph& g) {
  std::vector<std::uint32_t> d(g.num_vertices());
  for (std::size_t v = 0; v < d.size(); ++v) d[v] = static_cast<std::uint32_t>(g.out_degree(static_cast<VertexId>(v)));
  return d;
}

/// SplitMix64 (Steele, Lea & Flood). Fully specified integer arithmetic, so
/// a seed yields the same stream on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Unbiased draw from [0, bound) using Lemire's multiply-shift with
  /// rejection on the low 32 bits of each 64-bit output.
  std::uint32_t below(std::uint32_t bound) {
    std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next())) * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const std::uint32_t threshold = static_cast<std::uint32_t>(-bound) % bound;
      while (low < threshold) {
        m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next())) * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

 private:
  std::uint64_t state_;
};

/// m edges with both endpoints uniform on [0, n), source drawn first.
inline EdgeList generate_uniform(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_uniform: n must be at least 1");
  if (n > std::numeric_limits<VertexId>::max())
    throw RangeError("generate_uniform: n exceeds the 32-bit vertex id space");
  SplitMix64 rng(seed);
  EdgeList list;
  list.declared_vertices = n;
  list.edges.resize(m);
  const auto bound = static_cast<std::uint32_t>(n);
  for (auto& e : list.edges) {
    e.src = rng.below(bound);
    e.dst = rng.below(bound);
  }
  return list;
}

}  // namespace actorgraph
