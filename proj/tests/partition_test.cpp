#include <algorithm>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "actorgraph/partition.hpp"

using namespace actorgraph;

TEST(ChunkOf, Examples) {
  Partition p10x4(10, 4);
  EXPECT_EQ(p10x4.chunk_size(), 3u);
  EXPECT_EQ(chunk_of(9, p10x4), 3u);

  Partition p10x1(10, 1);
  for (VertexId v = 0; v < 10; ++v) EXPECT_EQ(chunk_of(v, p10x1), 0u);

  Partition p4x4(4, 4);
  EXPECT_EQ(chunk_of(2, p4x4), 2u);
}

TEST(ChunkOf, ChunksCoverVerticesContiguously) {
  for (std::size_t n : {0u, 1u, 5u, 10u, 17u, 64u, 100u}) {
    for (std::size_t c : {1u, 2u, 3u, 4u, 7u, 8u, 16u, 200u}) {
      Partition p(n, c);
      std::size_t covered = 0;
      for (ChunkId k = 0; k < c; ++k) {
        EXPECT_EQ(p.base(k), std::min(k * p.chunk_size(), n));
        if (k + 1 < c && p.end(k) < n) {
          EXPECT_EQ(p.size(k), p.chunk_size());
        }
        covered += p.size(k);
      }
      EXPECT_EQ(covered, n);
      for (VertexId v = 0; v < n; ++v) {
        const auto k = p.chunk_of(v);
        ASSERT_LT(k, c);
        EXPECT_LE(p.base(k), v);
        EXPECT_LT(v, p.base(k) + p.chunk_size());
      }
    }
  }
}

TEST(BuildChunks, TwoCycleTwoChunks) {
  auto g = build_graph(EdgeList{{{0, 1}, {1, 0}}, std::nullopt});
  auto chunks = build_chunks(g, 2);
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].base, 0u);
  ASSERT_EQ(chunks[0].num_local(), 1u);
  EXPECT_EQ(std::vector<VertexId>(chunks[0].neighbors(0).begin(), chunks[0].neighbors(0).end()),
            std::vector<VertexId>{1});
  EXPECT_EQ(chunks[1].base, 1u);
  EXPECT_EQ(std::vector<VertexId>(chunks[1].neighbors(0).begin(), chunks[1].neighbors(0).end()),
            std::vector<VertexId>{0});
}

TEST(BuildChunks, SingleChunkIsIdentity) {
  auto g = build_graph(generate_uniform(100, 400, 3));
  auto chunks = build_chunks(g, 1);
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(std::vector<EdgeIndex>(chunks[0].offsets.begin(), chunks[0].offsets.end()),
            std::vector<EdgeIndex>(g.offsets().begin(), g.offsets().end()));
  EXPECT_EQ(std::vector<VertexId>(chunks[0].targets.begin(), chunks[0].targets.end()),
            std::vector<VertexId>(g.targets().begin(), g.targets().end()));
}

TEST(BuildChunks, ConcatenationReproducesGraph) {
  auto g = build_graph(generate_uniform(500, 2000, 7));
  for (std::size_t c : {1u, 2u, 3u, 4u, 9u, 600u}) EXPECT_EQ(concatenate(build_chunks(g, c)), g) << c << " chunks";
}

TEST(BuildChunks, EmptyTrailingChunks) {
  auto g = build_graph(EdgeList{{{0, 2}, {2, 1}}, std::nullopt});
  auto chunks = build_chunks(g, 8);
  ASSERT_EQ(chunks.size(), 8u);
  for (std::size_t c = 3; c < 8; ++c) {
    EXPECT_EQ(chunks[c].num_local(), 0u);
    EXPECT_EQ(chunks[c].num_edges(), 0u);
  }
  EXPECT_EQ(concatenate(chunks), g);
}

namespace {

std::vector<std::pair<VertexId, VertexId>> pairs_of(const ChunkEdges& c) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::size_t i = 0; i < c.num_local(); ++i)
    for (auto t : c.neighbors(i)) out.emplace_back(static_cast<VertexId>(i), t);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<VertexId, VertexId>> pairs_of(const DestMajorEdges& d) {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::size_t g = 0; g < d.num_groups(); ++g)
    for (auto s : d.group_sources(g)) out.emplace_back(s, d.group_dest[g]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ToDestMajor, HandRegrouped) {
  // Chunk 0 of a 12-vertex graph with chunk_size 4: edges 0->5, 1->5, 0->9.
  Partition p(12, 3);
  ASSERT_EQ(p.chunk_size(), 4u);
  ChunkEdges c;
  c.base = 0;
  c.offsets = {0, 2, 3, 3, 3};
  c.targets = {5, 9, 5};
  auto d = to_dest_major(c, p);
  EXPECT_EQ(d.chunk_groups, (std::vector<std::size_t>{0, 0, 1, 2}));
  ASSERT_EQ(d.num_groups(), 2u);
  EXPECT_EQ(d.group_dest[0], 5u);
  EXPECT_EQ(std::vector<VertexId>(d.group_sources(0).begin(), d.group_sources(0).end()), (std::vector<VertexId>{0, 1}));
  EXPECT_EQ(d.group_dest[1], 9u);
  EXPECT_EQ(std::vector<VertexId>(d.group_sources(1).begin(), d.group_sources(1).end()), (std::vector<VertexId>{0}));
  EXPECT_EQ(pairs_of(d), pairs_of(c));
}

TEST(ToDestMajor, EmptyChunk) {
  Partition p(4, 2);
  ChunkEdges c;
  c.base = 2;
  c.offsets = {0, 0, 0};
  auto d = to_dest_major(c, p);
  EXPECT_EQ(d.num_groups(), 0u);
  EXPECT_EQ(d.num_edges(), 0u);
  EXPECT_EQ(d.chunk_groups, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(ToDestMajor, PreservesPairsAndOrdering) {
  auto g = build_graph(generate_uniform(300, 3000, 11));
  for (std::size_t nc : {1u, 3u, 8u}) {
    Partition p(g.num_vertices(), nc);
    auto chunks = build_chunks(g, p);
    for (const auto& c : chunks) {
      auto d = to_dest_major(c, p);
      EXPECT_EQ(pairs_of(d), pairs_of(c));
      for (std::size_t q = 0; q < nc; ++q) {
        for (auto k = d.chunk_groups[q]; k < d.chunk_groups[q + 1]; ++k) {
          EXPECT_EQ(p.chunk_of(d.group_dest[k]), q);
          EXPECT_FALSE(d.group_sources(k).empty());
          EXPECT_TRUE(std::is_sorted(d.group_sources(k).begin(), d.group_sources(k).end()));
          if (k > d.chunk_groups[q]) {
            EXPECT_LT(d.group_dest[k - 1], d.group_dest[k]);
          }
        }
      }
    }
  }
}
