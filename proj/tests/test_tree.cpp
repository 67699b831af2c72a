#include <doctest.h>

#include <numeric>
#include <sstream>

#include "brute.hpp"
#include "treeprofile/oracle.hpp"
#include "treeprofile/sampler.hpp"
#include "treeprofile/tree.hpp"

using namespace treeprofile;

namespace {
OrderedTree from_code(std::vector<std::uint32_t> c) { return OrderedTree(c); }
const OrderedTree path3 = from_code({1, 1, 0});
const OrderedTree path4 = from_code({1, 1, 1, 0});
const OrderedTree star3 = from_code({3, 0, 0, 0});
const OrderedTree single = from_code({0});
}  // namespace

TEST_CASE("ordered tree construction") {
  CHECK(path4.size() == 4);
  CHECK(path4.parent(3) == 2);
  CHECK(star3.outdegree(0) == 3);
  CHECK(star3.subtree_size(0) == 4);
  CHECK_THROWS(OrderedTree(std::vector<std::uint32_t>{1, 0, 0}));
  CHECK_THROWS(OrderedTree(std::vector<std::uint32_t>{2, 0}));
  CHECK(OrderedTree::from_parentheses(star3.to_parentheses()) == star3);
  CHECK(single.to_parentheses() == "()");
  CHECK_THROWS(OrderedTree::from_parentheses("(()"));
  auto t = OrderedTree::from_child_lists(2, {{}, {0}, {1, 3}, {}});
  CHECK(t.outdegrees() == std::vector<std::uint32_t>{2, 1, 0, 0});
}

TEST_CASE("height profile") {
  CHECK(height_profile(path3).counts == std::vector<std::int64_t>{1, 1, 1});
  CHECK(height_profile(star3).counts == std::vector<std::int64_t>{1, 3});
  CHECK(height_profile(single).counts == std::vector<std::int64_t>{1});
}

TEST_CASE("interpolation") {
  auto p3 = height_profile(path3), s3 = height_profile(star3);
  CHECK(interpolate(p3, 0.5) == doctest::Approx(1.0));
  CHECK(interpolate(s3, 0.5) == doctest::Approx(2.0));
  CHECK(interpolate(s3, -1.0) == 0.0);
  CHECK(interpolate(s3, 2.0) == 0.0);
  CHECK(interpolate(s3, 1.0) == doctest::Approx(3.0));
  // integral over [-1, inf) is the vertex count
  CHECK(integrate_interpolated(s3.counts, -1.0, 10.0) == doctest::Approx(4.0));
  CHECK(integrate_interpolated(p3.counts, -5.0, 50.0) == doctest::Approx(3.0));
  CHECK(integrate_interpolated(s3.counts, 0.0, 0.5) == doctest::Approx(0.5 * 0.5 * (1.0 + 2.0)));
}

TEST_CASE("distance profile by definition") {
  CHECK(distance_profile_naive(path3).counts == std::vector<std::int64_t>{3, 4, 2});
  CHECK(distance_profile_naive(path4).counts == std::vector<std::int64_t>{4, 6, 4, 2});
  CHECK(distance_profile_naive(star3).counts == std::vector<std::int64_t>{4, 6, 6});
  CHECK(distance_profile_naive(single).counts == std::vector<std::int64_t>{1});
}

TEST_CASE("wiener index") {
  CHECK(wiener_index(distance_profile_naive(path4)) == 10);
  CHECK(wiener_index(distance_profile_naive(star3)) == 9);
  CHECK(wiener_index(distance_profile_naive(single)) == 0);
  CHECK(wiener_index_direct(path4.adjacency()) == 10);
  CHECK(wiener_index_direct(star3.adjacency()) == 9);
}

TEST_CASE("width, height, diameter") {
  auto a = width_height_diameter(path3);
  CHECK(a.width == 1);
  CHECK(a.height == 2);
  CHECK(a.diameter == 2);
  auto b = width_height_diameter(star3);
  CHECK(b.width == 3);
  CHECK(b.height == 1);
  CHECK(b.diameter == 2);
  auto c = width_height_diameter(single);
  CHECK(c.width == 1);
  CHECK(c.height == 0);
  CHECK(c.diameter == 0);
}

TEST_CASE("labelled trees") {
  LabelledTree p(3, {{1, 2}, {2, 3}});
  CHECK(distance_profile_from_rootings(p).counts == std::vector<std::int64_t>{3, 4, 2});
  LabelledTree s(4, {{1, 2}, {1, 3}, {1, 4}});
  CHECK(distance_profile_from_rootings(s).counts == std::vector<std::int64_t>{4, 6, 6});
  CHECK(s.leaf_count() == 3);
  CHECK_THROWS(LabelledTree(3, {{1, 2}, {1, 2}}));
  CHECK_THROWS(LabelledTree(3, {{1, 4}, {1, 2}}));
  std::istringstream in("u,v\n1,2\n2,3\n3,4\n");
  auto q = LabelledTree::from_csv(in);
  CHECK(q.size() == 4);
  CHECK(distance_profile_naive(q).counts == std::vector<std::int64_t>{4, 6, 4, 2});
  CHECK(LabelledTree::from_line(q.to_line()).canonical() == q.canonical());
  auto r = s.rooted_at(2);
  CHECK(height_profile(r).counts == std::vector<std::int64_t>{1, 1, 2});
}

TEST_CASE("profiles on random trees agree with brute force") {
  GwSampler gw(OffspringDistribution(WeightSequence::geometric(0.5)));
  RngStream rng(7, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng.index(120);
    auto t = gw.conditioned(n, rng);
    auto naive = distance_profile_naive(t);
    CHECK(naive.counts == brute::pair_distances(t));
    CHECK(wiener_index(naive) == brute::wiener_double_loop(t));
    CHECK(wiener_index_direct(t.adjacency()) == brute::wiener_double_loop(t));
    std::vector<std::uint32_t> labels(n);
    std::iota(labels.begin(), labels.end(), 1u);
    auto lt = to_labelled(t, labels);
    CHECK(distance_profile_from_rootings(lt).counts == naive.counts);
    auto h = height_profile(t);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0}) == std::int64_t(n));
    CHECK(naive.counts[0] == std::int64_t(n));
    CHECK(std::accumulate(naive.counts.begin(), naive.counts.end(), std::int64_t{0}) == std::int64_t(n * n));
    for (std::size_t k = 1; k < naive.counts.size(); ++k) CHECK(naive.counts[k] % 2 == 0);
    CHECK(integrate_interpolated(naive.counts, -1.0, double(naive.counts.size()) + 1) == doctest::Approx(double(n * n)));
  }
}

TEST_CASE("rerooting transform") {
  PointedTree root{star3, 0};
  auto same = reroot_transform(root);
  CHECK(same.tree == star3);
  CHECK(same.mark == 0);

  // path 0-1-2 marked at 2
  PointedTree pt{path3, 2};
  auto r = reroot_transform(pt);
  CHECK(r.tree.size() == 3);
  CHECK(fringe_code(r.tree, r.mark) == std::vector<std::uint32_t>{0});
  // new root is old vertex 1: it has the old root as its only child
  CHECK(r.tree.outdegree(0) == 1);
  CHECK(r.tree.outdegree(1) == 1);

  GwSampler gw(OffspringDistribution(WeightSequence::from_table({0.25, 0.5, 0.25})));
  RngStream rng(3, 1);
  for (int rep = 0; rep < 50; ++rep) {
    auto t = gw.conditioned(1 + 2 * rng.index(40), rng);
    const auto v = static_cast<Vertex>(rng.index(t.size()));
    auto out = reroot_transform({t, v});
    CHECK(fringe_code(out.tree, out.mark) == fringe_code(t, v));
    CHECK(out.tree.size() == t.size());
  }
}
