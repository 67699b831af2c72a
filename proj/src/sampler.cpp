#include "treeprofile/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "treeprofile/genfun.hpp"

namespace treeprofile {
namespace {

std::size_t draw_discrete(const std::vector<double>& weights, RngStream& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw NumericalError("no feasible outcome (all weights zero)");
  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    if (u < weights[k]) return k;
    u -= weights[k];
  }
  for (std::size_t k = weights.size(); k-- > 0;)
    if (weights[k] > 0.0) return k;
  return 0;
}

void fisher_yates(std::vector<std::uint32_t>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.index(i)]);
}

// Split a valid forest code into per-tree lengths.
std::vector<std::size_t> split_sizes(const std::vector<std::uint32_t>& code, std::size_t m) {
  std::vector<std::size_t> sizes;
  sizes.reserve(m);
  std::int64_t walk = 0, level = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    walk += static_cast<std::int64_t>(code[i]) - 1;
    if (walk < level) {
      sizes.push_back(i + 1 - start);
      start = i + 1;
      level = walk;
    }
  }
  return sizes;
}

}  // namespace

// ------------------------------------------------------------------ GwSampler

GwSampler::GwSampler(OffspringDistribution p) : p_(std::move(p)) {
  const auto probs = p_.probabilities();
  cond_.assign(probs.size(), 0.0);
  double tail = 0.0;
  for (std::size_t k = probs.size(); k-- > 0;) {
    tail += probs[k];
    cond_[k] = tail > 0.0 ? std::min(1.0, probs[k] / tail) : 0.0;
  }
  offset_ = 0;
  while (offset_ < probs.size() && probs[offset_] <= 0.0) ++offset_;
  span_ = p_.span();
}

void GwSampler::check_feasible(std::size_t n, std::size_t m) const {
  if (m == 0 || m > n) throw std::invalid_argument("forest needs 1 <= m <= n (m=" + std::to_string(m) + ")");
  if (offset_ > 0) throw NumericalError("offspring law has p_0 = 0; finite trees are impossible");
  const std::size_t d = span_;
  if (d > 1 && (n % d) != (m % d)) {
    std::ostringstream os;
    os << "size n=" << n << " is infeasible: offspring span " << d << " requires n ≡ " << (m % d) << " (mod " << d
       << ")";
    throw NumericalError(os.str());
  }
}

std::vector<std::uint32_t> GwSampler::forest_code(std::size_t n, std::size_t m, RngStream& rng,
                                                  std::vector<std::size_t>* tree_sizes) const {
  check_feasible(n, m);
  const auto target = static_cast<std::int64_t>(n - m);
  const std::size_t K = cond_.size();
  std::vector<std::int64_t> count(K, 0);
  auto& eng = rng.engine();

  std::uint64_t attempt = 0;
  for (;; ++attempt) {
    if (attempt >= kMaxRetries) {
      std::ostringstream os;
      os << "conditioning on size n=" << n << " with m=" << m << " trees exceeded " << kMaxRetries
         << " attempts (offspring mean " << p_.mean() << ")";
      throw NumericalError(os.str());
    }
    // Multinomial counts drawn by successive binomials; reject as soon as the
    // offspring total can no longer equal n - m.
    std::int64_t left = static_cast<std::int64_t>(n);
    std::int64_t total = 0;
    bool ok = true;
    std::fill(count.begin(), count.end(), 0);
    for (std::size_t k = 0; k < K && left > 0; ++k) {
      std::int64_t c;
      if (k + 1 == K || cond_[k] >= 1.0) c = left;
      else if (cond_[k] <= 0.0) c = 0;
      else c = std::binomial_distribution<std::int64_t>(left, cond_[k])(eng);
      count[k] = c;
      left -= c;
      total += static_cast<std::int64_t>(k) * c;
      const auto kk = static_cast<std::int64_t>(k);
      if (total > target || total + (kk + 1) * left > target ||
          total + static_cast<std::int64_t>(K - 1) * left < target) {
        ok = false;
        break;
      }
    }
    if (ok && left == 0 && total == target) break;
  }

  std::vector<std::uint32_t> xi;
  xi.reserve(n);
  for (std::size_t k = 0; k < K; ++k) xi.insert(xi.end(), static_cast<std::size_t>(count[k]), static_cast<std::uint32_t>(k));
  fisher_yates(xi, rng);

  // Cycle lemma: S_j = sum_{i<j} (xi_i - 1) ends at -m; the valid rotations
  // start right after the first visits to levels M, ..., M+m-1 (M the minimum).
  std::int64_t s = 0, minimum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    s += static_cast<std::int64_t>(xi[j]) - 1;
    minimum = std::min(minimum, s);
  }
  const auto choice = static_cast<std::int64_t>(rng.index(m));
  const std::int64_t level = minimum + choice;
  std::size_t start = 0;
  s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    s += static_cast<std::int64_t>(xi[j]) - 1;
    if (s == level) {
      start = (j + 1) % n;
      break;
    }
  }
  std::rotate(xi.begin(), xi.begin() + static_cast<std::ptrdiff_t>(start), xi.end());
  if (tree_sizes) *tree_sizes = split_sizes(xi, m);
  return xi;
}

std::vector<OrderedTree> GwSampler::forest(std::size_t n, std::size_t m, RngStream& rng) const {
  std::vector<std::size_t> sizes;
  const auto code = forest_code(n, m, rng, &sizes);
  std::vector<OrderedTree> trees;
  trees.reserve(m);
  std::size_t pos = 0;
  for (auto sz : sizes) {
    trees.emplace_back(std::span<const std::uint32_t>(code.data() + pos, sz));
    pos += sz;
  }
  return trees;
}

OrderedTree GwSampler::conditioned(std::size_t n, RngStream& rng) const {
  if (n == 0) throw std::invalid_argument("tree size must be at least 1");
  return OrderedTree(forest_code(n, 1, rng));
}

// ---------------------------------------------------------- ModifiedGwSampler

ModifiedGwSampler::ModifiedGwSampler(OffspringDistribution p, OffspringDistribution p0)
    : gw_(std::move(p)), p0_(std::move(p0)) {}

std::shared_ptr<const std::vector<double>> ModifiedGwSampler::sum_law(std::size_t n) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(n);
  if (it != cache_.end()) return it->second;
  auto probs = gw_.law().probabilities();
  auto law = std::make_shared<const std::vector<double>>(power_truncated(probs, n, n));
  cache_.emplace(n, law);
  return law;
}

std::vector<double> ModifiedGwSampler::root_degree_law(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("tree size must be at least 1");
  if (n == 1) return {1.0};
  // P(root degree k) ∝ p0_k P(forest of k trees has n-1 vertices) = p0_k (k/(n-1)) P(S_{n-1} = n-1-k)
  const auto law = sum_law(n - 1);
  const std::size_t kmax = std::min(n - 1, p0_.probabilities().size() - 1);
  std::vector<double> w(kmax + 1, 0.0);
  for (std::size_t k = 1; k <= kmax; ++k)
    w[k] = p0_.probability(k) * static_cast<double>(k) / static_cast<double>(n - 1) * (*law)[n - 1 - k];
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0))
    throw NumericalError("no feasible root degree for size n=" + std::to_string(n));
  for (auto& x : w) x /= total;
  return w;
}

OrderedTree ModifiedGwSampler::sample(std::size_t n, RngStream& rng) const {
  if (n == 0) throw std::invalid_argument("tree size must be at least 1");
  if (n == 1) {
    if (!(p0_.probability(0) > 0.0)) throw NumericalError("size n=1 needs root weight p0_0 > 0");
    return OrderedTree();
  }
  const auto law = root_degree_law(n);
  const std::size_t k = draw_discrete(law, rng);
  std::vector<std::uint32_t> code;
  code.reserve(n);
  code.push_back(static_cast<std::uint32_t>(k));
  const auto branches = gw_.forest_code(n - 1, k, rng);
  code.insert(code.end(), branches.begin(), branches.end());
  return OrderedTree(code);
}

// ------------------------------------------------------------ UnrootedSampler

namespace {
OffspringDistribution branch_law(const WeightSequence& w) {
  return criticalize(unrooted_to_rooted(w).phi).distribution;
}
}  // namespace

UnrootedSampler::UnrootedSampler(const WeightSequence& w, Marking marking)
    : marking_(marking), gw_(branch_law(w)) {
  if (w.kind() != WeightKind::unrooted_w) throw std::invalid_argument("unrooted samplers need unrooted weights");
  if (marking == Marking::vertex) {
    auto laws = critical_unrooted_laws(w);
    modified_ = std::make_unique<ModifiedGwSampler>(std::move(laws.p), std::move(laws.p_root));
  }
}

OrderedTree UnrootedSampler::sample_shape(std::size_t n, RngStream& rng) const {
  if (n == 0) throw std::invalid_argument("tree size must be at least 1");
  switch (marking_) {
    case Marking::vertex: return modified_->sample(n, rng);
    case Marking::edge: {
      if (n < 2) throw std::invalid_argument("edge marking needs n >= 2");
      std::vector<std::size_t> sizes;
      auto code = gw_.forest_code(n, 2, rng, &sizes);
      // Second root becomes the last child of the first.
      std::vector<std::uint32_t> joined;
      joined.reserve(n);
      joined.push_back(code[0] + 1);
      joined.insert(joined.end(), code.begin() + 1, code.end());
      return OrderedTree(joined);
    }
    case Marking::leaf: {
      if (n < 2) throw std::invalid_argument("leaf marking needs n >= 2");
      auto code = gw_.forest_code(n - 1, 1, rng);
      code.insert(code.begin(), 1u);
      return OrderedTree(code);
    }
  }
  return OrderedTree();
}

std::pair<std::size_t, std::size_t> UnrootedSampler::sample_edge_split(std::size_t n, RngStream& rng) const {
  if (marking_ != Marking::edge) throw std::logic_error("edge split requires the edge marking");
  std::vector<std::size_t> sizes;
  gw_.forest_code(n, 2, rng, &sizes);
  return {sizes[0], sizes[1]};
}

LabelledTree UnrootedSampler::sample(std::size_t n, RngStream& rng) const {
  return random_labelling(sample_shape(n, rng), rng);
}

LabelledTree random_labelling(const OrderedTree& t, RngStream& rng) {
  std::vector<std::uint32_t> labels(t.size());
  std::iota(labels.begin(), labels.end(), 1u);
  fisher_yates(labels, rng);
  return to_labelled(t, labels);
}

OrderedTree sample_conditioned_gw(const OffspringDistribution& p, std::size_t n, RngStream& rng) {
  return GwSampler(p).conditioned(n, rng);
}

std::vector<OrderedTree> sample_forest(const OffspringDistribution& p, std::size_t n, std::size_t m, RngStream& rng) {
  return GwSampler(p).forest(n, m, rng);
}

OrderedTree sample_modified_gw(const OffspringDistribution& p, const OffspringDistribution& p0, std::size_t n,
                               RngStream& rng) {
  return ModifiedGwSampler(p, p0).sample(n, rng);
}

LabelledTree sample_unrooted_vertexmark(const WeightSequence& w, std::size_t n, RngStream& rng) {
  return UnrootedSampler(w, Marking::vertex).sample(n, rng);
}
LabelledTree sample_unrooted_edgemark(const WeightSequence& w, std::size_t n, RngStream& rng) {
  return UnrootedSampler(w, Marking::edge).sample(n, rng);
}
LabelledTree sample_unrooted_leafmark(const WeightSequence& w, std::size_t n, RngStream& rng) {
  return UnrootedSampler(w, Marking::leaf).sample(n, rng);
}

}  // namespace treeprofile
