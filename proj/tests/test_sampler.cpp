#include <doctest.h>

#include <map>
#include <numeric>

#include "treeprofile/oracle.hpp"
#include "treeprofile/sampler.hpp"

using namespace treeprofile;

namespace {
const OffspringDistribution geo(WeightSequence::geometric(0.5));
const OffspringDistribution bin(WeightSequence::from_table({0.25, 0.5, 0.25}));
}  // namespace

TEST_CASE("streams are reproducible") {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  GwSampler gw(geo);
  const auto ta = gw.conditioned(500, a), tb = gw.conditioned(500, b), tc = gw.conditioned(500, c);
  CHECK(ta.to_parentheses() == tb.to_parentheses());
  CHECK(ta.to_parentheses() != tc.to_parentheses());
}

TEST_CASE("forced shapes") {
  RngStream rng(1, 0);
  GwSampler gw(geo);
  CHECK(gw.conditioned(1, rng).to_parentheses() == "()");
  for (auto& t : gw.forest(5, 5, rng)) CHECK(t.size() == 1);
  CHECK(sample_unrooted_vertexmark(WeightSequence::factorial_unrooted(), 2, rng).size() == 2);
  CHECK(sample_unrooted_edgemark(WeightSequence::factorial_unrooted(), 2, rng).size() == 2);
  const auto leaf3 = sample_unrooted_leafmark(WeightSequence::factorial_unrooted(), 3, rng);
  auto d = leaf3.degrees();
  std::sort(d.begin(), d.end());
  CHECK(d == std::vector<std::uint32_t>{1, 1, 2});
  ModifiedGwSampler m(geo, OffspringDistribution(WeightSequence::from_table({0, 1})));
  CHECK(m.sample(2, rng).to_parentheses() == "(())");
  CHECK_THROWS(m.sample(1, rng));
}

TEST_CASE("span errors name the residue class") {
  GwSampler gw(OffspringDistribution(WeightSequence::from_table({0.5, 0, 0.5})));
  RngStream rng(1, 0);
  CHECK_THROWS_AS(gw.conditioned(4, rng), NumericalError);
  try {
    gw.conditioned(4, rng);
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("mod 2") != std::string::npos);
  }
  CHECK(gw.conditioned(5, rng).size() == 5);
}

TEST_CASE("sampled trees are valid") {
  GwSampler gw(bin);
  RngStream rng(2, 0);
  for (int r = 0; r < 100; ++r) {
    const auto t = gw.conditioned(1 + 2 * rng.index(100), rng);
    const auto od = t.outdegrees();
    CHECK(std::accumulate(od.begin(), od.end(), std::size_t{0}) == t.size() - 1);
  }
}

TEST_CASE("conditioned sampler matches the exact law, small n") {
  GwSampler gw(geo);
  for (std::size_t n : {3, 4, 5}) {
    const auto law = exact_conditioned_law(geo, n);
    std::map<std::string, std::size_t> counts;
    RngStream rng(100 + n, 0);
    for (int r = 0; r < 20000; ++r) ++counts[tree_key(gw.conditioned(n, rng))];
    CHECK(chi_square_compare(law, counts).p_value > 1e-3);
  }
  // path 4/5, cherry 1/5 for the binary law
  GwSampler gb(bin);
  RngStream rng(7, 0);
  int path = 0;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) path += gb.conditioned(3, rng).outdegree(0) == 1;
  CHECK(std::abs(path / double(reps) - 0.8) < 4 * std::sqrt(0.16 / reps));
}

TEST_CASE("forest size split") {
  // geometric, n=4, m=2: (1,3), (2,2), (3,1) with probabilities 2/5, 1/5, 2/5
  GwSampler gw(geo);
  RngStream rng(3, 0);
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    std::vector<std::size_t> sizes;
    gw.forest_code(4, 2, rng, &sizes);
    ++seen[{sizes[0], sizes[1]}];
  }
  CHECK(seen.size() == 3);
  auto p = chi_square_compare({0.4, 0.2, 0.4}, {double(seen[{1, 3}]), double(seen[{2, 2}]), double(seen[{3, 1}])});
  CHECK(p.p_value > 1e-3);
  // m = 1 is the conditioned tree
  auto one = gw.forest(7, 1, rng);
  CHECK(one.size() == 1);
  CHECK(one[0].size() == 7);
}

TEST_CASE("edge split at n=4") {
  UnrootedSampler s(WeightSequence::from_json(nlohmann::json::parse(R"({"kind":"geometric","params":{"q":0.5,"unrooted":true}})")),
                    Marking::edge);
  RngStream rng(4, 0);
  std::vector<double> obs(3, 0.0);
  for (int r = 0; r < 20000; ++r) ++obs[s.sample_edge_split(4, rng).first - 1];
  CHECK(chi_square_compare({0.4, 0.2, 0.4}, obs).p_value > 1e-3);
}

TEST_CASE("modified sampler with p0 = p is the conditioned law") {
  ModifiedGwSampler m(geo, geo);
  const auto law = exact_conditioned_law(geo, 6);
  std::map<std::string, std::size_t> counts;
  RngStream rng(8, 0);
  for (int r = 0; r < 20000; ++r) ++counts[tree_key(m.sample(6, rng))];
  CHECK(chi_square_compare(law, counts).p_value > 1e-3);
  // root degree law sums to one
  const auto rd = m.root_degree_law(50);
  CHECK(std::accumulate(rd.begin(), rd.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("unrooted samplers match their labelled laws, n <= 6") {
  const auto w = WeightSequence::factorial_unrooted();
  for (Marking mk : {Marking::vertex, Marking::edge, Marking::leaf}) {
    UnrootedSampler s(w, mk);
    for (std::size_t n : {4, 5}) {
      const auto law = mk == Marking::leaf ? exact_leafbiased_law(w, n) : exact_labelled_law(w, n);
      std::map<std::string, std::size_t> counts;
      RngStream rng(9, n);
      for (int r = 0; r < 30000; ++r) ++counts[tree_key(s.sample(n, rng))];
      CHECK(chi_square_compare(law, counts).p_value > 1e-3);
    }
  }
}

TEST_CASE("non-crossing weights give the 2 3^{-k} root law") {
  UnrootedSampler s(WeightSequence::factorial_unrooted(), Marking::vertex);
  RngStream rng(10, 0);
  std::vector<double> obs(12, 0.0);
  const std::size_t n = 400;
  for (int r = 0; r < 5000; ++r) {
    const auto t = s.sample_shape(n, rng);
    obs[std::min<std::size_t>(t.outdegree(0), 11)] += 1;
  }
  // exact finite-n law of the root degree
  ModifiedGwSampler m(critical_unrooted_laws(WeightSequence::factorial_unrooted()).p,
                      critical_unrooted_laws(WeightSequence::factorial_unrooted()).p_root);
  auto exact = m.root_degree_law(n);
  std::vector<double> probs(12, 0.0);
  for (std::size_t k = 0; k < exact.size(); ++k) probs[std::min<std::size_t>(k, 11)] += exact[k];
  std::vector<double> pp, oo;
  for (std::size_t k = 0; k < 12; ++k)
    if (probs[k] > 0) {
      pp.push_back(probs[k]);
      oo.push_back(obs[k]);
    }
  CHECK(chi_square_compare(pp, oo).p_value > 1e-3);
}
