#include "treeprofile/tree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace treeprofile {
namespace {

// Preorder listing of the tree given by child lists; `order[i]` is the old id
// of the vertex with new id i.
std::vector<Vertex> preorder(Vertex root, const std::vector<std::vector<Vertex>>& children) {
  std::vector<Vertex> order;
  order.reserve(children.size());
  std::vector<Vertex> stack{root};
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    order.push_back(v);
    const auto& ch = children[v];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

std::vector<std::uint32_t> outdegrees_in_order(const std::vector<Vertex>& order,
                                               const std::vector<std::vector<Vertex>>& children) {
  std::vector<std::uint32_t> d(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) d[i] = static_cast<std::uint32_t>(children[order[i]].size());
  return d;
}

struct Dsu {
  std::vector<std::uint32_t> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

std::uint32_t parse_label(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  std::uint32_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("bad vertex label '" + std::string(s) + "'");
  return value;
}

LabelledTree::Edge parse_edge(std::string_view s) {
  auto comma = s.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("edge needs 'u,v': '" + std::string(s) + "'");
  return {parse_label(s.substr(0, comma)), parse_label(s.substr(comma + 1))};
}

std::vector<std::int64_t> bfs_depth_counts(const Adjacency& g, Vertex root, std::vector<std::uint32_t>& dist,
                                           std::vector<Vertex>& queue) {
  std::vector<std::int64_t> counts;
  const std::uint32_t unseen = std::numeric_limits<std::uint32_t>::max();
  std::fill(dist.begin(), dist.end(), unseen);
  queue.clear();
  queue.push_back(root);
  dist[root] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex v = queue[head];
    if (dist[v] >= counts.size()) counts.resize(dist[v] + 1, 0);
    ++counts[dist[v]];
    for (Vertex w : g.neighbors(v)) {
      if (dist[w] == unseen) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return counts;
}

void add_into(std::vector<std::int64_t>& acc, const std::vector<std::int64_t>& x) {
  if (acc.size() < x.size()) acc.resize(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += x[i];
}

}  // namespace

// ---------------------------------------------------------------- Adjacency

Adjacency::Adjacency(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges)
    : offsets_(n + 1, 0), targets_(2 * edges.size()) {
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
    ++offsets_[u + 1];
    ++offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (auto [u, v] : edges) {
    targets_[fill[u]++] = v;
    targets_[fill[v]++] = u;
  }
}

// -------------------------------------------------------------- OrderedTree

OrderedTree::OrderedTree(std::span<const std::uint32_t> outdegrees) {
  const std::size_t n = outdegrees.size();
  if (n == 0) throw std::invalid_argument("tree must have at least one vertex");
  // Lukasiewicz check: partial sums of (d-1) stay >= 0 until the last step, which hits -1.
  std::int64_t walk = 0;
  for (std::size_t i = 0; i < n; ++i) {
    walk += static_cast<std::int64_t>(outdegrees[i]) - 1;
    if (walk < 0 && i + 1 < n) throw std::invalid_argument("outdegree sequence closes early");
  }
  if (walk != -1) throw std::invalid_argument("outdegree sum must be n-1");

  parent_.assign(n, kNoVertex);
  child_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) child_offsets_[i + 1] = child_offsets_[i] + outdegrees[i];
  children_.resize(n - 1);

  std::vector<Vertex> open;  // vertices with unfilled child slots
  std::vector<std::uint32_t> filled(n, 0);
  if (outdegrees[0] > 0) open.push_back(0);
  for (Vertex v = 1; v < n; ++v) {
    Vertex p = open.back();
    parent_[v] = p;
    children_[child_offsets_[p] + filled[p]] = v;
    if (++filled[p] == outdegrees[p]) open.pop_back();
    if (outdegrees[v] > 0) open.push_back(v);
  }

  subtree_size_.assign(n, 1);
  for (std::size_t v = n; v-- > 1;) subtree_size_[parent_[v]] += subtree_size_[v];
}

OrderedTree OrderedTree::from_child_lists(Vertex root, const std::vector<std::vector<Vertex>>& children) {
  auto order = preorder(root, children);
  if (order.size() != children.size()) throw std::invalid_argument("child lists do not span a tree");
  return OrderedTree(outdegrees_in_order(order, children));
}

OrderedTree OrderedTree::from_parentheses(std::string_view text) {
  std::vector<std::uint32_t> deg;
  std::vector<std::size_t> stack;
  for (char c : text) {
    if (c == '(') {
      if (!stack.empty()) ++deg[stack.back()];
      else if (!deg.empty()) throw std::invalid_argument("parenthesis string has more than one root");
      stack.push_back(deg.size());
      deg.push_back(0);
    } else if (c == ')') {
      if (stack.empty()) throw std::invalid_argument("unbalanced parentheses");
      stack.pop_back();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument(std::string("unexpected character '") + c + "' in tree encoding");
    }
  }
  if (!stack.empty() || deg.empty()) throw std::invalid_argument("unbalanced parentheses");
  return OrderedTree(deg);
}

std::vector<std::uint32_t> OrderedTree::outdegrees() const {
  std::vector<std::uint32_t> d(size());
  for (Vertex v = 0; v < size(); ++v) d[v] = outdegree(v);
  return d;
}

std::vector<std::uint32_t> OrderedTree::depths() const {
  std::vector<std::uint32_t> d(size(), 0);
  for (Vertex v = 1; v < size(); ++v) d[v] = d[parent_[v]] + 1;
  return d;
}

std::string OrderedTree::to_parentheses() const {
  std::string s;
  s.reserve(2 * size());
  // In preorder, vertex v's subtree is [v, v + size(v)); close it right after.
  std::vector<Vertex> open;
  for (Vertex v = 0; v < size(); ++v) {
    while (!open.empty() && v >= open.back() + subtree_size_[open.back()]) {
      s.push_back(')');
      open.pop_back();
    }
    s.push_back('(');
    open.push_back(v);
  }
  s.append(open.size(), ')');
  return s;
}

Adjacency OrderedTree::adjacency() const {
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(size() - 1);
  for (Vertex v = 1; v < size(); ++v) edges.emplace_back(parent_[v], v);
  return Adjacency(size(), edges);
}

// ------------------------------------------------------------- LabelledTree

LabelledTree::LabelledTree(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n == 0) throw std::invalid_argument("tree must have at least one vertex");
  if (edges_.size() != n - 1)
    throw std::invalid_argument("a tree on " + std::to_string(n) + " vertices needs " + std::to_string(n - 1) +
                                " edges, got " + std::to_string(edges_.size()));
  Dsu dsu(n);
  for (auto [u, v] : edges_) {
    if (u < 1 || v < 1 || u > n || v > n) throw std::invalid_argument("edge label outside 1..n");
    if (u == v) throw std::invalid_argument("self-loop");
    if (!dsu.unite(u - 1, v - 1)) throw std::invalid_argument("edges contain a cycle");
  }
}

LabelledTree LabelledTree::from_csv(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view s(line);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    if (s.empty() || s.front() == '#') continue;
    if (!std::isdigit(static_cast<unsigned char>(s.front()))) continue;  // header
    edges.push_back(parse_edge(s));
  }
  const std::size_t n = edges.size() + 1;
  return LabelledTree(n, std::move(edges));
}

LabelledTree LabelledTree::from_line(std::string_view line) {
  std::vector<Edge> edges;
  while (!line.empty()) {
    auto semi = line.find(';');
    auto part = line.substr(0, semi);
    if (part.find_first_not_of(" \t\r\n") != std::string_view::npos) edges.push_back(parse_edge(part));
    if (semi == std::string_view::npos) break;
    line.remove_prefix(semi + 1);
  }
  const std::size_t n = edges.size() + 1;
  return LabelledTree(n, std::move(edges));
}

std::vector<std::uint32_t> LabelledTree::degrees() const {
  std::vector<std::uint32_t> d(n_, 0);
  for (auto [u, v] : edges_) {
    ++d[u - 1];
    ++d[v - 1];
  }
  return d;
}

std::size_t LabelledTree::leaf_count() const {
  if (n_ == 1) return 1;
  auto d = degrees();
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), 1u));
}

Adjacency LabelledTree::adjacency() const {
  std::vector<std::pair<Vertex, Vertex>> e;
  e.reserve(edges_.size());
  for (auto [u, v] : edges_) e.emplace_back(u - 1, v - 1);
  return Adjacency(n_, e);
}

OrderedTree LabelledTree::rooted_at(std::uint32_t label) const {
  if (label < 1 || label > n_) throw std::out_of_range("root label outside 1..n");
  Adjacency g = adjacency();
  std::vector<std::vector<Vertex>> children(n_);
  std::vector<Vertex> parent(n_, kNoVertex);
  std::vector<Vertex> stack{label - 1};
  parent[label - 1] = label - 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : g.neighbors(v)) {
      if (parent[w] != kNoVertex) continue;
      parent[w] = v;
      children[v].push_back(w);
      stack.push_back(w);
    }
    std::sort(children[v].begin(), children[v].end());
  }
  return OrderedTree::from_child_lists(label - 1, children);
}

std::string LabelledTree::to_csv() const {
  std::ostringstream os;
  for (auto [u, v] : edges_) os << u << ',' << v << '\n';
  return os.str();
}

std::string LabelledTree::to_line() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (i) os << ';';
    os << edges_[i].first << ',' << edges_[i].second;
  }
  return os.str();
}

std::string LabelledTree::canonical() const {
  std::vector<Edge> e = edges_;
  for (auto& [u, v] : e)
    if (u > v) std::swap(u, v);
  std::sort(e.begin(), e.end());
  return LabelledTree(n_, std::move(e)).to_line();
}

// ----------------------------------------------------------------- profiles

ProfileCounts height_profile(const OrderedTree& t) {
  ProfileCounts p;
  auto d = t.depths();
  for (auto x : d) {
    if (x >= p.counts.size()) p.counts.resize(x + 1, 0);
    ++p.counts[x];
  }
  return p;
}

ProfileCounts height_profile(const Adjacency& g, Vertex root) {
  std::vector<std::uint32_t> dist(g.size());
  std::vector<Vertex> queue;
  return ProfileCounts{bfs_depth_counts(g, root, dist, queue)};
}

double interpolate(std::span<const std::int64_t> counts, double x) {
  if (!(x > -1.0) || x >= static_cast<double>(counts.size())) return 0.0;
  double fl = std::floor(x);
  auto i = static_cast<std::int64_t>(fl);
  double frac = x - fl;
  auto at = [&](std::int64_t k) -> double {
    return (k >= 0 && k < static_cast<std::int64_t>(counts.size())) ? static_cast<double>(counts[k]) : 0.0;
  };
  return (1.0 - frac) * at(i) + frac * at(i + 1);
}

double integrate_interpolated(std::span<const std::int64_t> counts, double lo, double hi) {
  if (hi < lo) return -integrate_interpolated(counts, hi, lo);
  const double len = static_cast<double>(counts.size());
  lo = std::max(lo, -1.0);
  hi = std::min(hi, len);
  if (hi <= lo) return 0.0;
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    double b = std::min(hi, std::floor(a) + 1.0);
    total += 0.5 * (b - a) * (interpolate(counts, a) + interpolate(counts, b));
    a = b;
  }
  return total;
}

DistanceProfileCounts distance_profile_naive(const Adjacency& g) {
  DistanceProfileCounts out;
  std::vector<std::uint32_t> dist(g.size());
  std::vector<Vertex> queue;
  queue.reserve(g.size());
  for (Vertex v = 0; v < g.size(); ++v) add_into(out.counts, bfs_depth_counts(g, v, dist, queue));
  return out;
}

DistanceProfileCounts distance_profile_naive(const OrderedTree& t) { return distance_profile_naive(t.adjacency()); }
DistanceProfileCounts distance_profile_naive(const LabelledTree& t) { return distance_profile_naive(t.adjacency()); }

DistanceProfileCounts distance_profile_from_rootings(const LabelledTree& t) {
  DistanceProfileCounts out;
  for (std::uint32_t label = 1; label <= t.size(); ++label)
    add_into(out.counts, height_profile(t.rooted_at(label)).counts);
  return out;
}

std::int64_t wiener_index(const DistanceProfileCounts& dp) {
  std::int64_t s = 0;
  for (std::size_t i = 1; i < dp.counts.size(); ++i) s += static_cast<std::int64_t>(i) * dp.counts[i];
  return s / 2;
}

std::int64_t wiener_index_direct(const Adjacency& g) {
  const std::size_t n = g.size();
  if (n <= 1) return 0;
  std::vector<Vertex> parent(n, kNoVertex), order;
  order.reserve(n);
  order.push_back(0);
  parent[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    Vertex v = order[head];
    for (Vertex w : g.neighbors(v))
      if (parent[w] == kNoVertex) {
        parent[w] = v;
        order.push_back(w);
      }
  }
  std::vector<std::int64_t> size(n, 1);
  std::int64_t total = 0;
  const auto nn = static_cast<std::int64_t>(n);
  for (std::size_t i = n; i-- > 1;) {
    Vertex v = order[i];
    total += size[v] * (nn - size[v]);
    size[parent[v]] += size[v];
  }
  return total;
}

std::size_t diameter(const Adjacency& g) {
  if (g.size() <= 1) return 0;
  std::vector<std::uint32_t> dist(g.size());
  std::vector<Vertex> queue;
  bfs_depth_counts(g, 0, dist, queue);
  Vertex far = queue.back();
  auto counts = bfs_depth_counts(g, far, dist, queue);
  return counts.size() - 1;
}

ShapeStats width_height_diameter(const OrderedTree& t) {
  auto p = height_profile(t);
  return {*std::max_element(p.counts.begin(), p.counts.end()), p.height(), diameter(t.adjacency())};
}

// ---------------------------------------------------------------- rerooting

PointedTree reroot_transform(const PointedTree& pt) {
  const OrderedTree& t = pt.tree;
  const Vertex v = pt.mark;
  if (v >= t.size()) throw std::out_of_range("mark outside tree");
  if (v == 0) return pt;

  std::vector<std::vector<Vertex>> children(t.size());
  for (Vertex u = 0; u < t.size(); ++u) {
    auto ch = t.children(u);
    children[u].assign(ch.begin(), ch.end());
  }
  const Vertex pv = t.parent(v);
  auto& pc = children[pv];
  pc.erase(std::find(pc.begin(), pc.end(), v));
  children[0].push_back(v);

  // Reverse the root-to-pv path: each former parent becomes the last child.
  std::vector<Vertex> path;
  for (Vertex u = pv; u != 0; u = t.parent(u)) path.push_back(u);
  for (Vertex u : path) {
    Vertex p = t.parent(u);
    auto& c = children[p];
    c.erase(std::find(c.begin(), c.end(), u));
    children[u].push_back(p);
  }

  auto order = preorder(pv, children);
  std::vector<Vertex> new_id(t.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<Vertex>(i);
  return PointedTree{OrderedTree(outdegrees_in_order(order, children)), new_id[v]};
}

std::vector<std::uint32_t> fringe_code(const OrderedTree& t, Vertex v) {
  std::vector<std::uint32_t> code(t.subtree_size(v));
  for (std::size_t i = 0; i < code.size(); ++i) code[i] = t.outdegree(static_cast<Vertex>(v + i));
  return code;
}

LabelledTree to_labelled(const OrderedTree& t, std::span<const std::uint32_t> labels) {
  if (labels.size() != t.size()) throw std::invalid_argument("label count must equal tree size");
  std::vector<LabelledTree::Edge> edges;
  edges.reserve(t.size() - 1);
  for (Vertex v = 1; v < t.size(); ++v) edges.emplace_back(labels[t.parent(v)], labels[v]);
  return LabelledTree(t.size(), std::move(edges));
}

}  // namespace treeprofile
