#include <doctest.h>

#include <cmath>

#include "treeprofile/oracle.hpp"
#include "treeprofile/weights.hpp"

using namespace treeprofile;

TEST_CASE("mean and variance of the standard laws") {
  auto g = mean_variance(WeightSequence::geometric(0.5));
  CHECK(g.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.variance == doctest::Approx(2.0).epsilon(1e-12));
  // partial sums of 2^{-k-1}
  double m = 0, m2 = 0;
  for (int k = 0; k <= 60; ++k) {
    m += k * std::ldexp(1.0, -k - 1);
    m2 += double(k) * k * std::ldexp(1.0, -k - 1);
  }
  CHECK(g.mean == doctest::Approx(m).epsilon(1e-12));
  CHECK(g.variance == doctest::Approx(m2 - m * m).epsilon(1e-10));

  auto b = mean_variance(OffspringDistribution(WeightSequence::from_table({0.25, 0.5, 0.25})));
  CHECK(b.mean == doctest::Approx(1.0));
  CHECK(b.variance == doctest::Approx(0.5));
  auto p = mean_variance(WeightSequence::poisson(1.0));
  CHECK(p.mean == doctest::Approx(1.0));
  CHECK(p.variance == doctest::Approx(1.0));
}

TEST_CASE("tilt") {
  // phi_k = k+1 tilted by (4/9, 1/3) is 4(k+1) 3^{-k-2}
  auto lin = unrooted_to_rooted(WeightSequence::factorial_unrooted()).phi;
  auto t = tilt(lin, 4.0 / 9.0, 1.0 / 3.0);
  for (int k = 0; k < 10; ++k) CHECK(t.coefficient(k) == doctest::Approx(4.0 * (k + 1) * std::pow(3.0, -k - 2)));
  auto g = WeightSequence::geometric(0.5);
  auto id = tilt(g, 1, 1);
  auto two = tilt(g, 2, 1);
  for (int k = 0; k < 10; ++k) {
    CHECK(id.coefficient(k) == doctest::Approx(g.coefficient(k)));
    CHECK(two.coefficient(k) == doctest::Approx(std::ldexp(1.0, -k)));
  }
  CHECK_THROWS(tilt(g, -1, 1));
}

TEST_CASE("criticalize") {
  auto lin = unrooted_to_rooted(WeightSequence::factorial_unrooted()).phi;
  auto c = criticalize(lin);
  CHECK(c.a == doctest::Approx(4.0 / 9.0).epsilon(1e-9));
  CHECK(c.b == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(std::abs(c.distribution.mean() - 1.0) <= 1e-10);
  for (int k = 0; k < 10; ++k)
    CHECK(c.distribution.probability(k) == doctest::Approx(4.0 * (k + 1) * std::pow(3.0, -k - 2)).epsilon(1e-9));

  auto pc = criticalize(WeightSequence::poisson(1.0));
  CHECK(pc.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pc.b == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS(criticalize(WeightSequence::from_table({1.0, 1.0})));
  auto half = criticalize(WeightSequence::geometric(0.5, 1.0) /* 2^{-k} */);
  CHECK(half.b == doctest::Approx(1.0).epsilon(1e-9));
  for (int k = 0; k < 10; ++k) CHECK(half.distribution.probability(k) == doctest::Approx(std::ldexp(1.0, -k - 1)));
  double s = 0;
  for (double x : half.distribution.probabilities()) s += x;
  CHECK(std::abs(s - 1.0) <= 1e-12);
}

TEST_CASE("unrooted to rooted") {
  auto r = unrooted_to_rooted(WeightSequence::factorial_unrooted());
  for (int k = 0; k < 8; ++k) {
    CHECK(r.phi.coefficient(k) == doctest::Approx(k + 1.0));
    CHECK(r.phi_root.coefficient(k) == doctest::Approx(1.0));
  }
  auto ones = unrooted_to_rooted(WeightSequence(WeightKind::unrooted_w, Family::geometric, 1.0, 1.0));
  double f = 1;
  for (int k = 0; k < 8; ++k) {
    if (k) f *= k;
    CHECK(ones.phi.coefficient(k) == doctest::Approx(1.0 / f));
    CHECK(ones.phi_root.coefficient(k) == doctest::Approx(1.0 / f));
  }
  // w = (0,1,0,1): phi = (1, 0, 1/2), phi0 = (0, 1, 0, 1/6)
  auto t = unrooted_to_rooted(WeightSequence::from_table({0, 1, 0, 1}, WeightKind::unrooted_w));
  CHECK(t.phi.coefficient(0) == doctest::Approx(1.0));
  CHECK(t.phi.coefficient(1) == doctest::Approx(0.0));
  CHECK(t.phi.coefficient(2) == doctest::Approx(0.5));
  CHECK(t.phi_root.coefficient(3) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("root degree limit") {
  auto pl = root_degree_limit(OffspringDistribution(WeightSequence::poisson(1.0)));
  CHECK(pl[0] == 0.0);
  CHECK(pl[1] == doctest::Approx(std::exp(-1.0)));
  CHECK(pl[2] == doctest::Approx(std::exp(-1.0)));
  CHECK(pl[3] == doctest::Approx(std::exp(-1.0) / 2));
  CHECK(pl[4] == doctest::Approx(std::exp(-1.0) / 6));
  double s = 0;
  for (double x : pl) s += x;
  CHECK(std::abs(s - 1.0) <= 1e-12);
  auto gl = root_degree_limit(OffspringDistribution(WeightSequence::geometric(0.5)));
  for (int k = 1; k < 10; ++k) CHECK(gl[k] == doctest::Approx(k * std::ldexp(1.0, -k - 1)));
  auto pt = root_degree_limit(OffspringDistribution(WeightSequence::from_table({0, 0, 1})));
  CHECK(pt[2] == doctest::Approx(1.0));
  CHECK_THROWS(root_degree_limit(OffspringDistribution(WeightSequence::from_table({1.0}))));
}

TEST_CASE("tilting leaves the conditioned law unchanged") {
  auto base = WeightSequence::from_table({0.25, 0.5, 0.125, 0.125});
  auto tilted = tilt(base, 1.0 / base.gf_derivative(0, 0.7), 0.7);
  for (std::size_t n = 1; n <= 7; ++n) {
    auto a = exact_conditioned_law(OffspringDistribution(base), n);
    auto b = exact_conditioned_law(OffspringDistribution(tilted), n);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.probability(i) == doctest::Approx(b.probability(i)).epsilon(1e-12));
  }
}

TEST_CASE("vertex-marking laws share one tilt") {
  auto laws = critical_unrooted_laws(WeightSequence::factorial_unrooted());
  CHECK(laws.p.mean() == doctest::Approx(1.0).epsilon(1e-10));
  // p0_k = 2 3^{-k} given k >= 1 (degree 0 only occurs for n = 1)
  const double given = 1.0 - laws.p_root.probability(0);
  for (int k = 1; k < 8; ++k)
    CHECK(laws.p_root.probability(k) / given == doctest::Approx(2.0 * std::pow(3.0, -k)).epsilon(1e-9));
  for (int k = 0; k < 8; ++k) CHECK(laws.p.probability(k) == doctest::Approx(4.0 * (k + 1) * std::pow(3.0, -k - 2)));
}

TEST_CASE("json round trip and errors") {
  auto spec = nlohmann::json::parse(R"({"kind":"geometric","params":{"q":0.5}})");
  auto w = WeightSequence::from_json(spec);
  auto again = WeightSequence::from_json(w.to_json());
  for (int k = 0; k < 8; ++k) CHECK(again.coefficient(k) == doctest::Approx(w.coefficient(k)));
  CHECK_THROWS(WeightSequence::from_json(nlohmann::json::parse(R"({"kind":"geometric","bogus":1})")));
  CHECK_THROWS(WeightSequence::from_json(nlohmann::json::parse(R"({"kind":"nope"})")));
  auto f = WeightSequence::from_json(nlohmann::json::parse(R"({"kind":"factorial_unrooted"})"));
  CHECK(f.kind() == WeightKind::unrooted_w);
  CHECK(f.coefficient(4) == doctest::Approx(24.0));
}

TEST_CASE("span") {
  CHECK(OffspringDistribution(WeightSequence::from_table({0.5, 0, 0.5})).span() == 2);
  CHECK(OffspringDistribution(WeightSequence::geometric(0.5)).span() == 1);
}
