#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "treeprofile/rng.hpp"
#include "treeprofile/tree.hpp"
#include "treeprofile/weights.hpp"

namespace treeprofile {

inline constexpr std::uint64_t kMaxRetries = 10'000'000;

/// Galton-Watson trees and forests conditioned on their total size.
class GwSampler {
 public:
  explicit GwSampler(OffspringDistribution p);

  const OffspringDistribution& law() const { return p_; }
  OrderedTree conditioned(std::size_t n, RngStream& rng) const;
  std::vector<OrderedTree> forest(std::size_t n, std::size_t m, RngStream& rng) const;
  /// Preorder outdegree code of the forest, trees concatenated left to right.
  std::vector<std::uint32_t> forest_code(std::size_t n, std::size_t m, RngStream& rng,
                                         std::vector<std::size_t>* tree_sizes = nullptr) const;
  /// Throws NumericalError naming the feasible residue class when m trees
  /// cannot have n vertices in total.
  void check_feasible(std::size_t n, std::size_t m) const;

 private:
  OffspringDistribution p_;
  std::vector<double> cond_;  // p_k / sum_{j>=k} p_j
  std::size_t offset_ = 0;    // smallest k with p_k > 0
  std::size_t span_ = 1;
};

/// Root offspring from p0, all other vertices from p, conditioned on size n.
class ModifiedGwSampler {
 public:
  ModifiedGwSampler(OffspringDistribution p, OffspringDistribution p0);

  OrderedTree sample(std::size_t n, RngStream& rng) const;
  /// Exact law of the root degree at size n (index k = degree).
  std::vector<double> root_degree_law(std::size_t n) const;
  const GwSampler& branch_sampler() const { return gw_; }

 private:
  std::shared_ptr<const std::vector<double>> sum_law(std::size_t n) const;

  GwSampler gw_;
  OffspringDistribution p0_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const std::vector<double>>> cache_;
};

enum class Marking { vertex, edge, leaf };

/// Unrooted simply generated trees via one of the marking constructions.
/// The leaf construction yields the leaf-count biased law.
class UnrootedSampler {
 public:
  UnrootedSampler(const WeightSequence& w, Marking marking);

  Marking marking() const { return marking_; }
  /// The tree before labelling, rooted at the marked vertex (vertex marking),
  /// at the tail of the marked edge (edge marking) or at the marked leaf.
  OrderedTree sample_shape(std::size_t n, RngStream& rng) const;
  LabelledTree sample(std::size_t n, RngStream& rng) const;
  /// Sizes of the two trees joined by the marked edge (edge marking only).
  std::pair<std::size_t, std::size_t> sample_edge_split(std::size_t n, RngStream& rng) const;
  const OffspringDistribution& law() const { return gw_.law(); }

 private:
  Marking marking_;
  GwSampler gw_;
  std::unique_ptr<ModifiedGwSampler> modified_;
};

/// Uniformly random labelling 1..n of the vertices, order and root forgotten.
LabelledTree random_labelling(const OrderedTree& t, RngStream& rng);

OrderedTree sample_conditioned_gw(const OffspringDistribution& p, std::size_t n, RngStream& rng);
std::vector<OrderedTree> sample_forest(const OffspringDistribution& p, std::size_t n, std::size_t m, RngStream& rng);
OrderedTree sample_modified_gw(const OffspringDistribution& p, const OffspringDistribution& p0, std::size_t n,
                               RngStream& rng);
LabelledTree sample_unrooted_vertexmark(const WeightSequence& w, std::size_t n, RngStream& rng);
LabelledTree sample_unrooted_edgemark(const WeightSequence& w, std::size_t n, RngStream& rng);
LabelledTree sample_unrooted_leafmark(const WeightSequence& w, std::size_t n, RngStream& rng);

}  // namespace treeprofile
