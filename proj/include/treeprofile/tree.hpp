#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace treeprofile {

using Vertex = std::uint32_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

/// Undirected adjacency in compressed sparse row form, 0-based vertices.
class Adjacency {
 public:
  Adjacency() = default;
  Adjacency(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
};

/// Rooted ordered tree with vertices numbered 0..n-1 in depth-first (preorder)
/// order; the root is vertex 0 and each vertex's children are contiguous in
/// children().
class OrderedTree {
 public:
  OrderedTree() : OrderedTree(std::vector<std::uint32_t>{0}) {}

  /// Builds from the outdegree sequence in preorder (the Lukasiewicz code).
  explicit OrderedTree(std::span<const std::uint32_t> outdegrees);

  /// Builds from per-vertex ordered child lists; vertices are renumbered in preorder.
  static OrderedTree from_child_lists(Vertex root, const std::vector<std::vector<Vertex>>& children);
  /// Balanced parentheses, one "(...)" pair per vertex.
  static OrderedTree from_parentheses(std::string_view text);

  std::size_t size() const { return parent_.size(); }
  Vertex parent(Vertex v) const { return parent_[v]; }
  std::uint32_t outdegree(Vertex v) const {
    return static_cast<std::uint32_t>(child_offsets_[v + 1] - child_offsets_[v]);
  }
  std::span<const Vertex> children(Vertex v) const {
    return {children_.data() + child_offsets_[v], children_.data() + child_offsets_[v + 1]};
  }
  /// Number of vertices in the fringe subtree at v (v and its descendants).
  std::size_t subtree_size(Vertex v) const { return subtree_size_[v]; }
  std::vector<std::uint32_t> outdegrees() const;
  std::vector<std::uint32_t> depths() const;

  std::string to_parentheses() const;
  /// Unordered adjacency of the underlying graph.
  Adjacency adjacency() const;

  bool operator==(const OrderedTree& other) const { return parent_ == other.parent_ && child_offsets_ == other.child_offsets_; }

 private:
  std::vector<Vertex> parent_;
  std::vector<std::size_t> child_offsets_;
  std::vector<Vertex> children_;
  std::vector<std::uint32_t> subtree_size_;
};

/// Unrooted tree on labels 1..n given by its n-1 edges.
class LabelledTree {
 public:
  using Edge = std::pair<std::uint32_t, std::uint32_t>;

  /// Validates that the edges form a spanning tree on {1..n}.
  LabelledTree(std::size_t n, std::vector<Edge> edges);

  static LabelledTree from_csv(std::istream& in);
  static LabelledTree from_line(std::string_view line);  // "u,v;u,v;..."

  std::size_t size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<std::uint32_t> degrees() const;  // indexed by label-1
  std::size_t leaf_count() const;

  /// Rooted at `label`, children in ascending label order.
  OrderedTree rooted_at(std::uint32_t label) const;
  Adjacency adjacency() const;

  std::string to_csv() const;
  std::string to_line() const;
  /// Sorted edge list, identical for equal trees.
  std::string canonical() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

struct ProfileCounts {
  std::vector<std::int64_t> counts;
  std::size_t height() const { return counts.empty() ? 0 : counts.size() - 1; }
};

struct DistanceProfileCounts {
  std::vector<std::int64_t> counts;
  std::size_t diameter() const { return counts.empty() ? 0 : counts.size() - 1; }
};

struct PointedTree {
  OrderedTree tree;
  Vertex mark = 0;
};

struct ShapeStats {
  std::int64_t width;
  std::size_t height;
  std::size_t diameter;
};

ProfileCounts height_profile(const OrderedTree& t);
/// Breadth-first depth counts from `root`.
ProfileCounts height_profile(const Adjacency& g, Vertex root);

/// Triangular-kernel interpolation sum_i counts(i) tau(x - i).
double interpolate(std::span<const std::int64_t> counts, double x);
inline double interpolate(const ProfileCounts& p, double x) { return interpolate(p.counts, x); }
inline double interpolate(const DistanceProfileCounts& p, double x) { return interpolate(p.counts, x); }
/// Exact integral of the interpolated function over [lo, hi].
double integrate_interpolated(std::span<const std::int64_t> counts, double lo, double hi);

DistanceProfileCounts distance_profile_naive(const Adjacency& g);
DistanceProfileCounts distance_profile_naive(const OrderedTree& t);
DistanceProfileCounts distance_profile_naive(const LabelledTree& t);

DistanceProfileCounts distance_profile_from_rootings(const LabelledTree& t);

std::int64_t wiener_index(const DistanceProfileCounts& dp);
/// Sum over edges of s(n - s), s the size of one side; linear time.
std::int64_t wiener_index_direct(const Adjacency& g);

ShapeStats width_height_diameter(const OrderedTree& t);
std::size_t diameter(const Adjacency& g);

PointedTree reroot_transform(const PointedTree& pt);

/// Preorder outdegree code of the fringe subtree at v.
std::vector<std::uint32_t> fringe_code(const OrderedTree& t, Vertex v);

/// Forgets root and order; labels drawn from `labels` (labels[v] for vertex v).
LabelledTree to_labelled(const OrderedTree& t, std::span<const std::uint32_t> labels);

}  // namespace treeprofile
