#pragma once
// Independent brute-force helpers used only as test oracles.

#include <cstdint>
#include <vector>

#include "treeprofile/tree.hpp"

namespace brute {

using treeprofile::OrderedTree;
using treeprofile::Vertex;

// d(u,v) = depth(u) + depth(v) - 2 depth(lca), lca found by walking parents.
inline std::vector<std::int64_t> pair_distances(const OrderedTree& t) {
  const auto depth = t.depths();
  std::vector<std::int64_t> out;
  for (Vertex u = 0; u < t.size(); ++u)
    for (Vertex v = 0; v < t.size(); ++v) {
      Vertex a = u, b = v;
      while (a != b) {
        if (depth[a] >= depth[b]) a = t.parent(a);
        else b = t.parent(b);
      }
      const std::size_t d = depth[u] + depth[v] - 2 * depth[a];
      if (out.size() <= d) out.resize(d + 1, 0);
      ++out[d];
    }
  return out;
}

inline std::int64_t wiener_double_loop(const OrderedTree& t) {
  const auto d = pair_distances(t);
  std::int64_t s = 0;
  for (std::size_t k = 0; k < d.size(); ++k) s += static_cast<std::int64_t>(k) * d[k];
  return s / 2;
}

inline double catalan(unsigned n) {
  double c = 1;
  for (unsigned k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

}  // namespace brute
