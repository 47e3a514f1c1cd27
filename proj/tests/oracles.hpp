#pragma once

// Test-only reference computations, written independently of the library's
// algorithms: double-precision PageRank straight from the edge list,
// union-find components, and small graph builders.

#include <cstdint>
#include <numeric>
#include <vector>

#include "actorgraph/graph.hpp"

namespace oracle {

using actorgraph::Edge;
using actorgraph::EdgeList;
using actorgraph::Graph;
using actorgraph::VertexId;

inline std::vector<double> pagerank_double(const Graph& g, double alpha, std::size_t iterations) {
  const auto edges = g.edges();
  const std::size_t n = g.num_vertices();
  std::vector<double> deg(n, 0.0), a(n, 0.0), b(n, 0.0);
  for (const auto& e : edges) deg[e.src] += 1.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = deg[i] > 0 ? alpha * a[i] / deg[i] : 0.0;
      a[i] = 1.0 - alpha;
    }
    for (const auto& e : edges) a[e.dst] += b[e.src];
  }
  return a;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Minimum vertex id of each vertex's (undirected) component.
inline std::vector<VertexId> component_minimum(const Graph& g) {
  UnionFind uf(g.num_vertices());
  for (const auto& e : g.edges()) uf.unite(e.src, e.dst);
  std::vector<VertexId> out(g.num_vertices());
  // Union by minimum keeps each root at its component minimum.
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = static_cast<VertexId>(uf.find(v));
  return out;
}

/// Uniform random graph plus a ring edge v -> v+1 so no vertex dangles.
inline Graph dangling_free_graph(std::size_t n, std::size_t m, std::uint64_t seed) {
  auto list = actorgraph::generate_uniform(n, m, seed);
  for (std::size_t v = 0; v < n; ++v)
    list.edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>((v + 1) % n)});
  return actorgraph::build_graph(list);
}

}  // namespace oracle
