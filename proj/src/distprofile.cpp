#include "treeprofile/distprofile.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

#include "treeprofile/convolve.hpp"

namespace treeprofile {
namespace {

// Components smaller than this are processed inline rather than as tasks.
constexpr std::size_t kTaskCutoff = 4096;

struct Workspace {
  const Adjacency& g;
  std::vector<std::uint8_t> removed;
  std::vector<Vertex> parent;
  std::vector<std::uint32_t> size;
  std::vector<std::uint32_t> depth;

  explicit Workspace(const Adjacency& graph)
      : g(graph), removed(graph.size(), 0), parent(graph.size()), size(graph.size()), depth(graph.size()) {}

  // DFS order of the live component containing `root`.
  void collect(Vertex root, std::vector<Vertex>& order) {
    order.clear();
    order.push_back(root);
    parent[root] = kNoVertex;
    for (std::size_t head = 0; head < order.size(); ++head) {
      Vertex v = order[head];
      for (Vertex w : g.neighbors(v)) {
        if (removed[w] || w == parent[v]) continue;
        parent[w] = v;
        order.push_back(w);
      }
    }
  }

  Vertex find_centroid(const std::vector<Vertex>& order) {
    const auto total = static_cast<std::uint32_t>(order.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) size[*it] = 1;
    for (std::size_t i = order.size(); i-- > 1;) size[parent[order[i]]] += size[order[i]];
    Vertex best = kNoVertex;
    for (Vertex v : order) {
      std::uint32_t heaviest = total - size[v];
      for (Vertex w : g.neighbors(v))
        if (!removed[w] && w != parent[v]) heaviest = std::max(heaviest, size[w]);
      if (2 * heaviest <= total && v < best) best = v;
    }
    return best;
  }
};

void accumulate(std::vector<std::int64_t>& acc, const std::vector<std::int64_t>& x, std::size_t shift, int sign) {
  if (acc.size() < x.size() + shift) acc.resize(x.size() + shift, 0);
  for (std::size_t i = 0; i < x.size(); ++i) acc[i + shift] += sign * x[i];
}

// Ordered pairs whose path passes through the centroid c, including (c, c).
// Returns (neighbor, component size) for each live branch at c.
std::vector<std::pair<Vertex, std::size_t>> count_through(Workspace& ws, Vertex c, std::vector<std::int64_t>& acc) {
  std::vector<std::pair<Vertex, std::size_t>> branches;
  std::vector<std::int64_t> h{1};
  std::vector<Vertex> queue;
  for (Vertex s : ws.g.neighbors(c)) {
    if (ws.removed[s]) continue;
    // hs[d] counts vertices of this branch at distance d+1 from c
    std::vector<std::int64_t> hs;
    queue.clear();
    queue.push_back(s);
    ws.parent[s] = c;
    ws.depth[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Vertex v = queue[head];
      if (ws.depth[v] >= hs.size()) hs.resize(ws.depth[v] + 1, 0);
      ++hs[ws.depth[v]];
      for (Vertex w : ws.g.neighbors(v)) {
        if (ws.removed[w] || w == ws.parent[v]) continue;
        ws.parent[w] = v;
        ws.depth[w] = ws.depth[v] + 1;
        queue.push_back(w);
      }
    }
    branches.emplace_back(s, queue.size());
    accumulate(h, hs, 1, 1);
    accumulate(acc, autoconvolve_counts(hs), 2, -1);
  }
  accumulate(acc, autoconvolve_counts(h), 0, 1);
  return branches;
}

void decompose(Workspace& ws, Vertex root, std::vector<std::vector<std::int64_t>>& per_thread, bool parallel) {
  Vertex c;
  {
    std::vector<Vertex> order;
    ws.collect(root, order);
    c = ws.find_centroid(order);
  }
  const auto tid = static_cast<std::size_t>(parallel ? omp_get_thread_num() : 0);
  auto branches = count_through(ws, c, per_thread[tid]);
  ws.removed[c] = 1;
  for (auto [s, sz] : branches) {
    if (parallel && sz >= kTaskCutoff) {
#pragma omp task default(none) firstprivate(s, parallel) shared(ws, per_thread)
      decompose(ws, s, per_thread, parallel);
    } else {
      decompose(ws, s, per_thread, parallel);
    }
  }
}

}  // namespace

DistanceProfileCounts distance_profile_fast(const Adjacency& g, int jobs) {
  DistanceProfileCounts out;
  if (g.size() == 0) return out;
  Workspace ws(g);
  const bool parallel = jobs != 1 && g.size() >= kTaskCutoff;
  int threads = parallel ? (jobs > 0 ? jobs : omp_get_max_threads()) : 1;
  std::vector<std::vector<std::int64_t>> per_thread(static_cast<std::size_t>(threads));
  if (parallel) {
#pragma omp parallel num_threads(threads) default(none) shared(ws, per_thread, parallel)
#pragma omp single
    decompose(ws, 0, per_thread, parallel);
  } else {
    decompose(ws, 0, per_thread, false);
  }
  for (const auto& part : per_thread) accumulate(out.counts, part, 0, 1);
  while (out.counts.size() > 1 && out.counts.back() == 0) out.counts.pop_back();
  return out;
}

DistanceProfileCounts distance_profile_fast(const OrderedTree& t, int jobs) {
  return distance_profile_fast(t.adjacency(), jobs);
}
DistanceProfileCounts distance_profile_fast(const LabelledTree& t, int jobs) {
  return distance_profile_fast(t.adjacency(), jobs);
}

std::int64_t wiener_fast(const OrderedTree& t, int jobs) { return wiener_index(distance_profile_fast(t, jobs)); }
std::int64_t wiener_fast(const LabelledTree& t, int jobs) { return wiener_index(distance_profile_fast(t, jobs)); }

CentroidTrace centroid_decomposition(const Adjacency& g) {
  CentroidTrace trace;
  if (g.size() == 0) return trace;
  Workspace ws(g);
  std::vector<std::pair<Vertex, std::uint32_t>> stack{{0, 0}};
  std::vector<Vertex> order;
  while (!stack.empty()) {
    auto [root, level] = stack.back();
    stack.pop_back();
    ws.collect(root, order);
    Vertex c = ws.find_centroid(order);
    trace.centroid.push_back(c);
    trace.component_size.push_back(static_cast<std::uint32_t>(order.size()));
    trace.level.push_back(level);
    ws.removed[c] = 1;
    for (Vertex s : g.neighbors(c))
      if (!ws.removed[s]) stack.emplace_back(s, level + 1);
  }
  return trace;
}

}  // namespace treeprofile
