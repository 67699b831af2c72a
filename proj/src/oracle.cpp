#include "treeprofile/oracle.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "treeprofile/distprofile.hpp"

namespace treeprofile {
namespace {

void extend_ordered(std::size_t n, std::vector<std::uint32_t>& seq, std::int64_t walk,
                    std::vector<OrderedTree>& out) {
  const std::size_t i = seq.size();
  if (i == n) {
    out.emplace_back(seq);
    return;
  }
  const auto remaining_after = static_cast<std::int64_t>(n - i - 1);
  for (std::int64_t d = 0;; ++d) {
    const std::int64_t w = walk + d - 1;
    if (i + 1 == n) {
      if (w == -1) {
        seq.push_back(static_cast<std::uint32_t>(d));
        extend_ordered(n, seq, w, out);
        seq.pop_back();
      }
      if (w >= -1) break;
      continue;
    }
    if (w < 0) continue;
    if (w > remaining_after - 1) break;
    seq.push_back(static_cast<std::uint32_t>(d));
    extend_ordered(n, seq, w, out);
    seq.pop_back();
  }
}

LabelledTree prufer_decode(const std::vector<std::uint32_t>& seq, std::size_t n) {
  std::vector<std::uint32_t> degree(n + 1, 1);
  for (auto a : seq) ++degree[a];
  std::vector<LabelledTree::Edge> edges;
  edges.reserve(n - 1);
  for (auto a : seq) {
    std::uint32_t leaf = 1;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(leaf, a);
    --degree[leaf];
    --degree[a];
  }
  std::uint32_t u = 0, v = 0;
  for (std::uint32_t x = 1; x <= n; ++x) {
    if (degree[x] == 1) (u == 0 ? u : v) = x;
  }
  edges.emplace_back(u, v);
  return LabelledTree(n, std::move(edges));
}

// Calls f(seq) for every sequence in {1..n}^{n-2}.
template <class F>
void for_each_prufer(std::size_t n, F&& f) {
  std::vector<std::uint32_t> seq(n - 2, 1);
  while (true) {
    f(seq);
    std::size_t i = 0;
    while (i < seq.size() && seq[i] == n) seq[i++] = 1;
    if (i == seq.size()) break;
    ++seq[i];
  }
}

double factorial(std::size_t n) { return std::tgamma(static_cast<double>(n) + 1.0); }

struct LawBuilder {
  std::map<std::string, std::pair<LabelledTree, double>> cells;
  void add(const LabelledTree& t, double w) {
    auto key = tree_key(t);
    auto it = cells.find(key);
    if (it == cells.end()) cells.emplace(key, std::make_pair(t, w));
    else it->second.second += w;
  }
  LabelledEnsemble finish() {
    LabelledEnsemble e;
    for (auto& [key, cell] : cells) {
      e.items.push_back(cell.first);
      e.weights.push_back(cell.second);
    }
    e.total = std::accumulate(e.weights.begin(), e.weights.end(), 0.0);
    e.normalize();
    return e;
  }
};

// Adds w / n! for every labelling of the tree given by 0-based edges.
void add_all_labellings(LawBuilder& law, std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                        double weight) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 1u);
  const double share = weight / factorial(n);
  do {
    std::vector<LabelledTree::Edge> e;
    e.reserve(edges.size());
    for (auto [u, v] : edges) e.emplace_back(perm[u], perm[v]);
    law.add(LabelledTree(n, std::move(e)), share);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

std::vector<std::pair<Vertex, Vertex>> ordered_edges(const OrderedTree& t, Vertex offset = 0) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 1; v < t.size(); ++v) e.emplace_back(t.parent(v) + offset, v + offset);
  return e;
}

std::vector<double> statistic_of(const OrderedTree& t, Statistic s) {
  switch (s) {
    case Statistic::height_profile: {
      auto p = height_profile(t);
      return {p.counts.begin(), p.counts.end()};
    }
    case Statistic::distance_profile: {
      auto p = distance_profile_naive(t);
      return {p.counts.begin(), p.counts.end()};
    }
    case Statistic::width: return {static_cast<double>(width_height_diameter(t).width)};
    case Statistic::height: return {static_cast<double>(width_height_diameter(t).height)};
    case Statistic::diameter: return {static_cast<double>(width_height_diameter(t).diameter)};
    case Statistic::wiener: return {static_cast<double>(wiener_index_direct(t.adjacency()))};
    case Statistic::root_degree: return {static_cast<double>(t.outdegree(0))};
  }
  return {};
}

template <class Tree, class F>
std::vector<double> weighted_sum(const WeightedEnsemble<Tree>& e, F&& stat) {
  std::vector<double> acc;
  for (std::size_t i = 0; i < e.size(); ++i) {
    auto v = stat(e.items[i]);
    if (acc.size() < v.size()) acc.resize(v.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) acc[k] += e.probability(i) * v[k];
  }
  return acc;
}

}  // namespace

std::vector<OrderedTree> enumerate_ordered(std::size_t n) {
  if (n < 1 || n > 12) throw std::invalid_argument("enumerate_ordered supports 1 <= n <= 12 (got " + std::to_string(n) + ")");
  std::vector<OrderedTree> out;
  std::vector<std::uint32_t> seq;
  extend_ordered(n, seq, 0, out);
  return out;
}

std::vector<LabelledTree> enumerate_labelled(std::size_t n) {
  if (n < 1 || n > 8) throw std::invalid_argument("enumerate_labelled supports 1 <= n <= 8 (got " + std::to_string(n) + ")");
  if (n == 1) return {LabelledTree(1, {})};
  if (n == 2) return {LabelledTree(2, {{1, 2}})};
  std::vector<LabelledTree> out;
  for_each_prufer(n, [&](const std::vector<std::uint32_t>& seq) { out.push_back(prufer_decode(seq, n)); });
  return out;
}

double labelled_total_weight(const WeightSequence& w, std::size_t n) {
  if (n < 1 || n > 8) throw std::invalid_argument("labelled_total_weight supports 1 <= n <= 8");
  if (n == 1) return w.coefficient(0);
  if (n == 2) return w.coefficient(1) * w.coefficient(1);
  std::vector<double> wk(n);
  for (std::size_t k = 0; k < n; ++k) wk[k] = w.coefficient(k);
  double total = 0.0;
  std::vector<std::uint32_t> count(n + 1);
  for_each_prufer(n, [&](const std::vector<std::uint32_t>& seq) {
    std::fill(count.begin(), count.end(), 0u);
    for (auto a : seq) ++count[a];
    double prod = 1.0;
    for (std::size_t v = 1; v <= n; ++v) prod *= wk[count[v] + 1];
    total += prod;
  });
  return total;
}

std::string tree_key(const OrderedTree& t) { return t.to_parentheses(); }
std::string tree_key(const LabelledTree& t) { return t.canonical(); }

template <class Tree>
void WeightedEnsemble<Tree>::normalize() {
  if (!(total > 0.0)) throw NumericalError("ensemble has zero total weight");
  for (auto& w : weights) w /= total;
  total = 1.0;
}

template <class Tree>
std::vector<std::string> WeightedEnsemble<Tree>::keys() const {
  std::vector<std::string> k;
  k.reserve(items.size());
  for (const auto& t : items) k.push_back(tree_key(t));
  return k;
}

template <class Tree>
std::vector<double> WeightedEnsemble<Tree>::probabilities() const {
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights[i] / total;
  return p;
}

template struct WeightedEnsemble<OrderedTree>;
template struct WeightedEnsemble<LabelledTree>;

double ordered_weight(const OrderedTree& t, const OffspringDistribution& p) {
  double w = 1.0;
  for (Vertex v = 0; v < t.size(); ++v) w *= p.probability(t.outdegree(v));
  return w;
}

double modified_weight(const OrderedTree& t, const OffspringDistribution& p, const OffspringDistribution& p0) {
  double w = p0.probability(t.outdegree(0));
  for (Vertex v = 1; v < t.size(); ++v) w *= p.probability(t.outdegree(v));
  return w;
}

double labelled_weight(const LabelledTree& t, const WeightSequence& w) {
  if (t.size() == 1) return w.coefficient(0);
  double prod = 1.0;
  for (auto d : t.degrees()) prod *= w.coefficient(d);
  return prod;
}

OrderedEnsemble exact_conditioned_law(const OffspringDistribution& p, std::size_t n) {
  OrderedEnsemble e;
  for (auto& t : enumerate_ordered(n)) {
    double w = ordered_weight(t, p);
    if (w <= 0.0) continue;
    e.items.push_back(std::move(t));
    e.weights.push_back(w);
    e.total += w;
  }
  e.normalize();
  return e;
}

OrderedEnsemble exact_modified_law(const OffspringDistribution& p, const OffspringDistribution& p0, std::size_t n) {
  OrderedEnsemble e;
  for (auto& t : enumerate_ordered(n)) {
    double w = modified_weight(t, p, p0);
    if (w <= 0.0) continue;
    e.items.push_back(std::move(t));
    e.weights.push_back(w);
    e.total += w;
  }
  e.normalize();
  return e;
}

LabelledEnsemble exact_labelled_law(const WeightSequence& w, std::size_t n) {
  LabelledEnsemble e;
  for (auto& t : enumerate_labelled(n)) {
    double x = labelled_weight(t, w);
    if (x <= 0.0) continue;
    e.items.push_back(std::move(t));
    e.weights.push_back(x);
    e.total += x;
  }
  e.normalize();
  return e;
}

LabelledEnsemble exact_leafbiased_law(const WeightSequence& w, std::size_t n) {
  LabelledEnsemble e;
  for (auto& t : enumerate_labelled(n)) {
    double x = labelled_weight(t, w) * static_cast<double>(t.leaf_count());
    if (x <= 0.0) continue;
    e.items.push_back(std::move(t));
    e.weights.push_back(x);
    e.total += x;
  }
  e.normalize();
  return e;
}

LabelledEnsemble vertexmark_pushforward(const WeightSequence& w, std::size_t n) {
  if (n > 7) throw std::invalid_argument("pushforward enumeration supports n <= 7");
  const auto laws = critical_unrooted_laws(w);
  LawBuilder law;
  for (const auto& t : enumerate_ordered(n)) {
    double x = modified_weight(t, laws.p, laws.p_root);
    if (x > 0.0) add_all_labellings(law, n, ordered_edges(t), x);
  }
  return law.finish();
}

LabelledEnsemble edgemark_pushforward(const WeightSequence& w, std::size_t n) {
  if (n < 2 || n > 7) throw std::invalid_argument("edge-mark pushforward supports 2 <= n <= 7");
  const auto p = criticalize(unrooted_to_rooted(w).phi).distribution;
  LawBuilder law;
  for (std::size_t m = 1; m < n; ++m) {
    const auto left = enumerate_ordered(m);
    const auto right = enumerate_ordered(n - m);
    for (const auto& a : left) {
      const double wa = ordered_weight(a, p);
      if (wa <= 0.0) continue;
      for (const auto& b : right) {
        const double wb = ordered_weight(b, p);
        if (wb <= 0.0) continue;
        auto edges = ordered_edges(a);
        auto eb = ordered_edges(b, static_cast<Vertex>(m));
        edges.insert(edges.end(), eb.begin(), eb.end());
        edges.emplace_back(0, static_cast<Vertex>(m));
        add_all_labellings(law, n, edges, wa * wb);
      }
    }
  }
  return law.finish();
}

LabelledEnsemble leafmark_pushforward(const WeightSequence& w, std::size_t n) {
  if (n < 2 || n > 7) throw std::invalid_argument("leaf-mark pushforward supports 2 <= n <= 7");
  const auto p = criticalize(unrooted_to_rooted(w).phi).distribution;
  LawBuilder law;
  for (const auto& t : enumerate_ordered(n - 1)) {
    const double x = ordered_weight(t, p);
    if (x <= 0.0) continue;
    auto edges = ordered_edges(t, 1);
    edges.emplace_back(0, 1);
    add_all_labellings(law, n, edges, x);
  }
  return law.finish();
}

double law_discrepancy(const LabelledEnsemble& a, const LabelledEnsemble& b) {
  std::map<std::string, double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) diff[tree_key(a.items[i])] += a.probability(i);
  for (std::size_t i = 0; i < b.size(); ++i) diff[tree_key(b.items[i])] -= b.probability(i);
  double m = 0.0;
  for (auto& [k, d] : diff) m = std::max(m, std::abs(d));
  return m;
}

double total_variation(const LabelledEnsemble& a, const LabelledEnsemble& b) {
  std::map<std::string, double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) diff[tree_key(a.items[i])] += a.probability(i);
  for (std::size_t i = 0; i < b.size(); ++i) diff[tree_key(b.items[i])] -= b.probability(i);
  double s = 0.0;
  for (auto& [k, d] : diff) s += std::abs(d);
  return 0.5 * s;
}

std::vector<double> exact_moments(const OrderedEnsemble& ensemble, Statistic s) {
  return weighted_sum(ensemble, [s](const OrderedTree& t) { return statistic_of(t, s); });
}

std::vector<double> exact_moments(const LabelledEnsemble& ensemble, Statistic s) {
  // Rooted statistics use label 1 as the root.
  return weighted_sum(ensemble, [s](const LabelledTree& t) { return statistic_of(t.rooted_at(1), s); });
}

double check_reroot_preservation(const OffspringDistribution& p, std::size_t n_max) {
  std::map<std::string, double> before, after;
  auto key = [](const OrderedTree& t, Vertex v, std::uint32_t depth) {
    std::string k = std::to_string(t.size() - t.subtree_size(v) + 1) + "|" + std::to_string(depth) + "|";
    for (auto d : fringe_code(t, v)) k += std::to_string(d) + ",";
    return k;
  };
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (const auto& t : enumerate_ordered(n)) {
      const double w = ordered_weight(t, p);
      if (w <= 0.0) continue;
      const auto depth = t.depths();
      for (Vertex v = 0; v < t.size(); ++v) {
        before[key(t, v, depth[v])] += w;
        const auto hat = reroot_transform(PointedTree{t, v});
        after[key(hat.tree, hat.mark, hat.tree.depths()[hat.mark])] += w;
      }
    }
  }
  double m = 0.0;
  for (const auto& [k, w] : before) {
    auto it = after.find(k);
    m = std::max(m, std::abs(w - (it == after.end() ? 0.0 : it->second)));
  }
  for (const auto& [k, w] : after)
    if (!before.count(k)) m = std::max(m, w);
  return m;
}

ChiSquareResult chi_square_compare(const std::vector<double>& probabilities, const std::vector<double>& observed,
                                   double outside_support) {
  if (probabilities.size() != observed.size()) throw std::invalid_argument("chi-square: size mismatch");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0) + outside_support;
  const double psum = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  std::vector<std::size_t> idx(probabilities.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return probabilities[a] < probabilities[b]; });

  std::vector<std::pair<double, double>> cells;  // (expected, observed)
  double e_run = 0.0, o_run = 0.0;
  for (auto i : idx) {
    e_run += n * probabilities[i] / psum;
    o_run += observed[i];
    if (e_run >= 5.0) {
      cells.emplace_back(e_run, o_run);
      e_run = o_run = 0.0;
    }
  }
  if (e_run > 0.0 || o_run > 0.0) {
    if (cells.empty()) cells.emplace_back(e_run, o_run);
    else {
      cells.back().first += e_run;
      cells.back().second += o_run;
    }
  }
  if (cells.size() < 2) throw std::invalid_argument("chi-square needs at least 2 cells after pooling");
  const std::size_t dof = cells.size() - 1;
  if (outside_support > 0.0)
    return {std::numeric_limits<double>::infinity(), 0.0, dof, cells.size()};
  double stat = 0.0;
  for (auto [e, o] : cells) stat += (o - e) * (o - e) / e;
  const double pval = boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * stat);
  return {stat, pval, dof, cells.size()};
}

template <class Tree>
ChiSquareResult chi_square_compare(const WeightedEnsemble<Tree>& ensemble,
                                   const std::map<std::string, std::size_t>& counts) {
  const auto keys = ensemble.keys();
  std::vector<double> observed(keys.size(), 0.0);
  double matched = 0.0, all = 0.0;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < keys.size(); ++i) index[keys[i]] = i;
  for (const auto& [k, c] : counts) {
    all += static_cast<double>(c);
    auto it = index.find(k);
    if (it == index.end()) continue;
    observed[it->second] += static_cast<double>(c);
    matched += static_cast<double>(c);
  }
  return chi_square_compare(ensemble.probabilities(), observed, all - matched);
}

template ChiSquareResult chi_square_compare(const WeightedEnsemble<OrderedTree>&,
                                            const std::map<std::string, std::size_t>&);
template ChiSquareResult chi_square_compare(const WeightedEnsemble<LabelledTree>&,
                                            const std::map<std::string, std::size_t>&);

}  // namespace treeprofile
