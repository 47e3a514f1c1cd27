#pragma once

// Single-threaded reference implementations. These are the COST baseline
// and the oracle every parallel variant is checked against.

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "actorgraph/graph.hpp"

namespace actorgraph {

inline constexpr float kDefaultAlpha = 0.85f;
inline constexpr std::size_t kDefaultIterations = 20;

inline void check_alpha(float alpha) {
  if (!(alpha >= 0.0f && alpha <= 1.0f)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

/// Per-vertex contribution pushed along each out-edge. A vertex without
/// out-edges contributes nothing, so its value is pinned to 0 instead of
/// the non-finite a/0.
inline float scaled_contribution(float alpha, float rank, std::uint32_t degree) {
  return degree > 0 ? alpha * rank / static_cast<float>(degree) : 0.0f;
}

/// Twenty-iteration PageRank with f32 state. `a` starts at zero, so zero
/// iterations return all zeros.
inline std::vector<float> pagerank_serial(const Graph& g, float alpha = kDefaultAlpha,
                                          std::size_t iterations = kDefaultIterations) {
  check_alpha(alpha);
  const std::size_t n = g.num_vertices();
  std::vector<float> a(n, 0.0f);
  std::vector<float> b(n, 0.0f);
  const auto d = out_degrees(g);
  const auto offsets = g.offsets();
  const auto targets = g.targets();

  for (std::size_t iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = scaled_contribution(alpha, a[i], d[i]);
      a[i] = 1.0f - alpha;
    }
    for (std::size_t x = 0; x < n; ++x) {
      const float bx = b[x];
      for (auto e = offsets[x]; e < offsets[x + 1]; ++e) a[targets[e]] += bx;
    }
  }
  return a;
}

struct LabelPropResult {
  std::vector<VertexId> labels;
  std::size_t passes = 0;  // full edge scans, including the final unchanged one
};

/// Label propagation to fixpoint over a symmetrized graph. Labels are lowered
/// in place mid-scan and every pass scans all edges.
inline LabelPropResult labelprop_serial_detailed(const Graph& g_sym) {
  LabelPropResult result;
  auto& labels = result.labels;
  labels.resize(g_sym.num_vertices());
  std::iota(labels.begin(), labels.end(), VertexId{0});
  const auto offsets = g_sym.offsets();
  const auto targets = g_sym.targets();

  bool changed = true;
  while (changed) {
    changed = false;
    ++result.passes;
    for (std::size_t x = 0; x < labels.size(); ++x) {
      for (auto e = offsets[x]; e < offsets[x + 1]; ++e) {
        const auto y = targets[e];
        if (labels[x] < labels[y]) {
          labels[y] = labels[x];
          changed = true;
        }
      }
    }
  }
  return result;
}

inline std::vector<VertexId> labelprop_serial(const Graph& g_sym) { return labelprop_serial_detailed(g_sym).labels; }

}  // namespace actorgraph
