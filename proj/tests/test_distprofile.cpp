#include <doctest.h>

#include <cmath>
#include <numeric>

#include "brute.hpp"
#include "treeprofile/convolve.hpp"
#include "treeprofile/distprofile.hpp"
#include "treeprofile/sampler.hpp"

using namespace treeprofile;

TEST_CASE("convolution small cases") {
  std::vector<std::int64_t> a{1, 1}, b{1, 0, 2}, c{3};
  CHECK(convolve_counts(a, a) == std::vector<std::int64_t>{1, 2, 1});
  CHECK(convolve_counts(b, c) == std::vector<std::int64_t>{3, 0, 6});
  CHECK(autoconvolve_counts(a) == std::vector<std::int64_t>{1, 2, 1});
  CHECK(convolve_counts(std::vector<std::int64_t>{}, a).empty());
}

TEST_CASE("long convolutions match the schoolbook product") {
  RngStream rng(11, 0);
  std::vector<std::int64_t> a(10000), b(10000);
  for (auto& x : a) x = static_cast<std::int64_t>(rng.index(1000));
  for (auto& x : b) x = static_cast<std::int64_t>(rng.index(1000));
  const auto fast = convolve_counts(a, b);
  std::span<const std::int64_t> pa(a.data(), 1000), pb(b.data(), 1000);
  const auto slow = convolve_schoolbook(pa, pb);
  // the first 1000 output coefficients only involve the prefixes
  for (std::size_t k = 0; k < 1000; ++k) REQUIRE(fast[k] == slow[k]);
  const auto sq = autoconvolve_counts(a);
  const auto sq_slow = convolve_schoolbook(pa, pa);
  for (std::size_t k = 0; k < 1000; ++k) REQUIRE(sq[k] == sq_slow[k]);
}

TEST_CASE("huge coefficients fall back to exact arithmetic") {
  std::vector<std::int64_t> a(300, std::int64_t{1} << 40);
  const auto fast = convolve_counts(a, a);
  const auto slow = convolve_schoolbook(a, a);
  CHECK(fast == slow);
}

TEST_CASE("fast distance profile on small shapes") {
  OrderedTree path4(std::vector<std::uint32_t>{1, 1, 1, 0});
  OrderedTree star3(std::vector<std::uint32_t>{3, 0, 0, 0});
  CHECK(distance_profile_fast(path4).counts == std::vector<std::int64_t>{4, 6, 4, 2});
  CHECK(distance_profile_fast(star3).counts == std::vector<std::int64_t>{4, 6, 6});
  CHECK(distance_profile_fast(OrderedTree()).counts == std::vector<std::int64_t>{1});
  CHECK(wiener_fast(path4) == 10);
  CHECK(wiener_fast(star3) == 9);
}

TEST_CASE("fast equals naive on random trees") {
  const OffspringDistribution laws[] = {OffspringDistribution(WeightSequence::geometric(0.5)),
                                        OffspringDistribution(WeightSequence::poisson(1.0)),
                                        OffspringDistribution(WeightSequence::from_table({0.25, 0.5, 0.25}))};
  RngStream rng(5, 0);
  for (const auto& p : laws) {
    GwSampler gw(p);
    for (int rep = 0; rep < 30; ++rep) {
      std::size_t n = 2 + rng.index(600);
      if (p.span() == 2 && n % 2 == 0) ++n;
      const auto t = gw.conditioned(n, rng);
      const auto naive = distance_profile_naive(t);
      CHECK(distance_profile_fast(t, 1).counts == naive.counts);
      CHECK(distance_profile_fast(t, 0).counts == naive.counts);
      CHECK(wiener_fast(t) == wiener_index(naive));
    }
  }
  // big enough for the task-parallel path
  GwSampler gw(laws[0]);
  const auto t = gw.conditioned(9000, rng);
  const auto naive = distance_profile_naive(t);
  CHECK(distance_profile_fast(t, 0).counts == naive.counts);
  CHECK(distance_profile_fast(t, 1).counts == naive.counts);
}

TEST_CASE("a long path") {
  const std::size_t n = 5000;
  std::vector<std::uint32_t> code(n, 1);
  code.back() = 0;
  const auto d = distance_profile_fast(OrderedTree(code));
  REQUIRE(d.counts.size() == n);
  CHECK(d.counts[0] == std::int64_t(n));
  for (std::size_t k = 1; k < n; ++k) REQUIRE(d.counts[k] == 2 * std::int64_t(n - k));
}

TEST_CASE("centroid decomposition invariants") {
  GwSampler gw(OffspringDistribution(WeightSequence::geometric(0.5)));
  RngStream rng(9, 0);
  const auto t = gw.conditioned(3000, rng);
  const auto trace = centroid_decomposition(t.adjacency());
  CHECK(trace.centroid.size() == t.size());
  std::vector<int> seen(t.size(), 0);
  for (auto c : trace.centroid) ++seen[c];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int x) { return x == 1; }));
  const auto max_level = *std::max_element(trace.level.begin(), trace.level.end());
  CHECK(max_level <= std::uint32_t(std::log2(3000.0) + 1));
  // component sizes at least halve from one level to the next
  for (std::size_t i = 0; i < trace.level.size(); ++i)
    if (trace.level[i] == 0) CHECK(trace.component_size[i] == 3000);
}
