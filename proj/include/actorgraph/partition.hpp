#pragma once

// Contiguous vertex chunks and the two per-chunk edge layouts.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "actorgraph/graph.hpp"

namespace actorgraph {

using ChunkId = std::uint32_t;

/// Chunk c owns [base(c), base(c) + chunk_size) clipped to num_vertices.
/// Trailing chunks may be short or empty.
class Partition {
 public:
  Partition(std::size_t num_vertices, std::size_t num_chunks) : num_vertices_(num_vertices), num_chunks_(num_chunks) {
    if (num_chunks == 0) throw std::invalid_argument("Partition: need at least one chunk");
    chunk_size_ = std::max<std::size_t>(1, (num_vertices + num_chunks - 1) / num_chunks);
  }

  std::size_t num_vertices() const { return num_vertices_; }
  std::size_t num_chunks() const { return num_chunks_; }
  std::size_t chunk_size() const { return chunk_size_; }

  VertexId base(ChunkId c) const { return static_cast<VertexId>(std::min(std::size_t{c} * chunk_size_, num_vertices_)); }
  VertexId end(ChunkId c) const { return static_cast<VertexId>(std::min<std::size_t>(base(c) + chunk_size_, num_vertices_)); }
  std::size_t size(ChunkId c) const { return end(c) - base(c); }

  ChunkId chunk_of(VertexId v) const { return static_cast<ChunkId>(v / chunk_size_); }

 private:
  std::size_t num_vertices_;
  std::size_t num_chunks_;
  std::size_t chunk_size_;
};

inline ChunkId chunk_of(VertexId v, const Partition& p) { return p.chunk_of(v); }

/// Source-major edges of one chunk: local vertex i (global id base + i) has
/// targets[offsets[i] .. offsets[i+1]).
struct ChunkEdges {
  VertexId base = 0;
  std::vector<EdgeIndex> offsets{0};
  std::vector<VertexId> targets;

  std::size_t num_local() const { return offsets.size() - 1; }
  std::size_t num_edges() const { return targets.size(); }
  std::uint32_t degree(std::size_t local) const { return static_cast<std::uint32_t>(offsets[local + 1] - offsets[local]); }
  std::span<const VertexId> neighbors(std::size_t local) const {
    return std::span<const VertexId>(targets).subspan(offsets[local], offsets[local + 1] - offsets[local]);
  }
};

inline std::vector<ChunkEdges> build_chunks(const Graph& g, const Partition& p) {
  std::vector<ChunkEdges> chunks(p.num_chunks());
  const auto offsets = g.offsets();
  const auto targets = g.targets();
  for (ChunkId c = 0; c < p.num_chunks(); ++c) {
    auto& ce = chunks[c];
    ce.base = p.base(c);
    const auto first = offsets[p.base(c)];
    const auto last = offsets[p.end(c)];
    ce.offsets.resize(p.size(c) + 1);
    for (std::size_t i = 0; i <= p.size(c); ++i) ce.offsets[i] = offsets[p.base(c) + i] - first;
    ce.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(first),
                      targets.begin() + static_cast<std::ptrdiff_t>(last));
  }
  return chunks;
}

inline std::vector<ChunkEdges> build_chunks(const Graph& g, std::size_t num_chunks) {
  return build_chunks(g, Partition(g.num_vertices(), num_chunks));
}

/// Re-concatenates chunk layouts into one CSR graph.
inline Graph concatenate(std::span<const ChunkEdges> chunks) {
  std::vector<EdgeIndex> offsets{0};
  std::vector<VertexId> targets;
  for (const auto& ce : chunks) {
    for (std::size_t i = 0; i < ce.num_local(); ++i) offsets.push_back(offsets.back() + ce.degree(i));
    targets.insert(targets.end(), ce.targets.begin(), ce.targets.end());
  }
  return Graph(std::move(offsets), std::move(targets));
}

/// Edges of one chunk regrouped by destination: for each destination chunk
/// q, groups [chunk_groups[q], chunk_groups[q+1]) each hold one destination
/// and the local sources pointing at it.
struct DestMajorEdges {
  std::vector<std::size_t> chunk_groups;
  std::vector<VertexId> group_dest;
  std::vector<std::size_t> group_offsets{0};
  std::vector<VertexId> sources;  // local indices

  std::size_t num_groups() const { return group_dest.size(); }
  std::size_t num_edges() const { return sources.size(); }
  std::span<const VertexId> group_sources(std::size_t g) const {
    return std::span<const VertexId>(sources).subspan(group_offsets[g], group_offsets[g + 1] - group_offsets[g]);
  }
};

inline DestMajorEdges to_dest_major(const ChunkEdges& c, const Partition& p) {
  struct Pair {
    VertexId dest;
    VertexId local;
  };
  std::vector<Pair> pairs;
  pairs.reserve(c.num_edges());
  for (std::size_t i = 0; i < c.num_local(); ++i)
    for (auto t : c.neighbors(i)) pairs.push_back({t, static_cast<VertexId>(i)});
  // Pairs are generated in ascending local order, so a stable sort by
  // destination keeps each group's sources ascending.
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dest < y.dest; });

  DestMajorEdges out;
  out.chunk_groups.assign(p.num_chunks() + 1, 0);
  out.sources.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (k == 0 || pairs[k].dest != pairs[k - 1].dest) {
      if (k != 0) out.group_offsets.push_back(out.sources.size());
      out.group_dest.push_back(pairs[k].dest);
      ++out.chunk_groups[p.chunk_of(pairs[k].dest) + 1];
    }
    out.sources.push_back(pairs[k].local);
  }
  if (!pairs.empty()) out.group_offsets.push_back(out.sources.size());
  for (std::size_t q = 0; q < p.num_chunks(); ++q) out.chunk_groups[q + 1] += out.chunk_groups[q];
  return out;
}

}  // namespace actorgraph
