#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "treeprofile/tree.hpp"
#include "treeprofile/weights.hpp"

namespace treeprofile {

/// All ordered rooted trees with n vertices (1 <= n <= 12), in lexicographic
/// order of their preorder outdegree sequences.
std::vector<OrderedTree> enumerate_ordered(std::size_t n);
/// All labelled trees on {1..n} (1 <= n <= 8), in Prüfer-sequence order.
std::vector<LabelledTree> enumerate_labelled(std::size_t n);

/// Sum of prod_v w_{d(v)} over labelled trees with n vertices (from Prüfer degree counts).
double labelled_total_weight(const WeightSequence& w, std::size_t n);

std::string tree_key(const OrderedTree& t);
std::string tree_key(const LabelledTree& t);

template <class Tree>
struct WeightedEnsemble {
  std::vector<Tree> items;
  std::vector<double> weights;
  double total = 0.0;

  std::size_t size() const { return items.size(); }
  double probability(std::size_t i) const { return weights[i] / total; }
  /// Rescales so that the weights sum to 1; throws on zero total.
  void normalize();
  std::vector<std::string> keys() const;
  std::vector<double> probabilities() const;
};

using OrderedEnsemble = WeightedEnsemble<OrderedTree>;
using LabelledEnsemble = WeightedEnsemble<LabelledTree>;

/// prod_v p_{outdeg(v)}
double ordered_weight(const OrderedTree& t, const OffspringDistribution& p);
/// Root uses p0, other vertices p.
double modified_weight(const OrderedTree& t, const OffspringDistribution& p, const OffspringDistribution& p0);
/// prod_v w_{deg(v)}
double labelled_weight(const LabelledTree& t, const WeightSequence& w);

OrderedEnsemble exact_conditioned_law(const OffspringDistribution& p, std::size_t n);
OrderedEnsemble exact_modified_law(const OffspringDistribution& p, const OffspringDistribution& p0, std::size_t n);
LabelledEnsemble exact_labelled_law(const WeightSequence& w, std::size_t n);
/// Labelled law reweighted by the number of leaves.
LabelledEnsemble exact_leafbiased_law(const WeightSequence& w, std::size_t n);

/// Labelled laws obtained by pushing the marking constructions through
/// enumeration (every ordered tree or pair, every labelling); n <= 7.
LabelledEnsemble vertexmark_pushforward(const WeightSequence& w, std::size_t n);
LabelledEnsemble edgemark_pushforward(const WeightSequence& w, std::size_t n);
LabelledEnsemble leafmark_pushforward(const WeightSequence& w, std::size_t n);

/// Max absolute difference between two normalized laws over the union of supports.
double law_discrepancy(const LabelledEnsemble& a, const LabelledEnsemble& b);
double total_variation(const LabelledEnsemble& a, const LabelledEnsemble& b);

enum class Statistic { height_profile, distance_profile, width, height, diameter, wiener, root_degree };
/// Exact expectation of the statistic; vector-valued statistics are padded with zeros.
std::vector<double> exact_moments(const OrderedEnsemble& ensemble, Statistic s);
std::vector<double> exact_moments(const LabelledEnsemble& ensemble, Statistic s);

/// Sum over sizes 1..n_max of the joint law of (|T^v|, depth of v, shape of T_v)
/// under P•, before and after rerooting; returns the max absolute difference.
double check_reroot_preservation(const OffspringDistribution& p, std::size_t n_max);

struct ChiSquareResult {
  double statistic;
  double p_value;
  std::size_t dof;
  std::size_t cells;
};
/// Pearson test of observed counts against probabilities; cells with small
/// expectation are pooled smallest-first until every pooled cell expects >= 5.
/// Observations outside the support make the test fail with p = 0.
ChiSquareResult chi_square_compare(const std::vector<double>& probabilities, const std::vector<double>& observed,
                                   double outside_support = 0.0);
template <class Tree>
ChiSquareResult chi_square_compare(const WeightedEnsemble<Tree>& ensemble,
                                   const std::map<std::string, std::size_t>& counts);

}  // namespace treeprofile
