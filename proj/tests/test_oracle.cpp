#include <doctest.h>

#include <cmath>

#include "brute.hpp"
#include "treeprofile/oracle.hpp"

using namespace treeprofile;

namespace {
const OffspringDistribution geo(WeightSequence::geometric(0.5));
const OffspringDistribution bin(WeightSequence::from_table({0.25, 0.5, 0.25}));
}  // namespace

TEST_CASE("enumeration counts") {
  CHECK(enumerate_ordered(1).size() == 1);
  CHECK(enumerate_ordered(3).size() == 2);
  CHECK(enumerate_ordered(4).size() == 5);
  for (unsigned n = 1; n <= 12; ++n) CHECK(double(enumerate_ordered(n).size()) == brute::catalan(n - 1));
  CHECK_THROWS(enumerate_ordered(13));
  CHECK(enumerate_labelled(2).size() == 1);
  CHECK(enumerate_labelled(3).size() == 3);
  CHECK(enumerate_labelled(4).size() == 16);
  for (unsigned n = 2; n <= 8; ++n) CHECK(double(enumerate_labelled(n).size()) == std::pow(double(n), double(n) - 2));
  CHECK_THROWS(enumerate_labelled(9));
}

TEST_CASE("exact conditioned laws") {
  auto g = exact_conditioned_law(geo, 3);
  REQUIRE(g.size() == 2);
  CHECK(g.probability(0) == doctest::Approx(0.5));
  CHECK(g.probability(1) == doctest::Approx(0.5));
  auto b = exact_conditioned_law(bin, 3);
  double path = 0, cherry = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.items[i].outdegree(0) == 1) path += b.probability(i);
    else cherry += b.probability(i);
  }
  CHECK(path == doctest::Approx(0.8));
  CHECK(cherry == doctest::Approx(0.2));
  auto l = exact_labelled_law(WeightSequence::factorial_unrooted(), 3);
  REQUIRE(l.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(l.probability(i) == doctest::Approx(1.0 / 3.0));
  // modified law with p0 = p is the plain law
  for (std::size_t n = 1; n <= 7; ++n) {
    auto a = exact_conditioned_law(geo, n), m = exact_modified_law(geo, geo, n);
    REQUIRE(a.size() == m.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.probability(i) == doctest::Approx(m.probability(i)));
  }
}

TEST_CASE("exact moments") {
  auto g = exact_conditioned_law(geo, 3);
  CHECK(exact_moments(g, Statistic::distance_profile)[1] == doctest::Approx(4.0));
  CHECK(exact_moments(g, Statistic::width)[0] == doctest::Approx(1.5));
  for (std::size_t n = 1; n <= 8; ++n)
    CHECK(exact_moments(exact_conditioned_law(geo, n), Statistic::distance_profile)[0] == doctest::Approx(double(n)));
  auto l = exact_labelled_law(WeightSequence::factorial_unrooted(), 5);
  CHECK(exact_moments(l, Statistic::distance_profile)[0] == doctest::Approx(5.0));
}

TEST_CASE("marking constructions realize the same labelled law") {
  for (const auto& w : {WeightSequence::factorial_unrooted(),
                        WeightSequence(WeightKind::unrooted_w, Family::geometric, 1.0, 1.0)}) {
    for (std::size_t n = 2; n <= 6; ++n) {
      const auto target = exact_labelled_law(w, n);
      CHECK(law_discrepancy(vertexmark_pushforward(w, n), target) <= 1e-12);
      CHECK(law_discrepancy(edgemark_pushforward(w, n), target) <= 1e-12);
      CHECK(law_discrepancy(leafmark_pushforward(w, n), exact_leafbiased_law(w, n)) <= 1e-12);
    }
  }
}

TEST_CASE("leaf-biased law is the leaf-count reweighting") {
  const auto w = WeightSequence::factorial_unrooted();
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto plain = exact_labelled_law(w, n), biased = exact_leafbiased_law(w, n);
    double z = 0;
    for (std::size_t i = 0; i < plain.size(); ++i) z += plain.probability(i) * double(plain.items[i].leaf_count());
    const auto keys = biased.keys();
    for (std::size_t i = 0; i < plain.size(); ++i) {
      const double expect = plain.probability(i) * double(plain.items[i].leaf_count()) / z;
      CHECK(biased.probability(i) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(total_variation(exact_leafbiased_law(w, 3), exact_labelled_law(w, 3)) == doctest::Approx(0.0));
}

TEST_CASE("rerooting preserves the pointed measure") {
  CHECK(check_reroot_preservation(geo, 1) == 0.0);
  CHECK(check_reroot_preservation(geo, 5) <= 1e-12);
  CHECK(check_reroot_preservation(bin, 6) <= 1e-12);
}

TEST_CASE("chi-square") {
  std::vector<double> p{0.2, 0.3, 0.5};
  auto exact = chi_square_compare(p, {200, 300, 500});
  CHECK(exact.statistic == doctest::Approx(0.0));
  CHECK(exact.p_value == doctest::Approx(1.0));
  auto swapped = chi_square_compare(p, {500, 300, 200});
  CHECK(swapped.p_value < 1e-6);
  auto outside = chi_square_compare(p, {200, 300, 500}, 1);
  CHECK(outside.p_value == 0.0);
  CHECK_THROWS(chi_square_compare({1.0}, {10}));
}
