#include <doctest.h>

#include <cmath>

#include "treeprofile/stats.hpp"

using namespace treeprofile;

TEST_CASE("mean with standard error") {
  std::vector<double> x{1, 2, 3, 4};
  auto e = estimate_mean(x, 9);
  CHECK(e.value == doctest::Approx(2.5));
  // sample sd = sqrt(5/3)
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(e.reps == 4);
  CHECK(e.seed == 9);
  CHECK_THROWS(estimate_mean(std::vector<double>{1.0}));
}

TEST_CASE("quantiles") {
  std::vector<double> x{4, 1, 3, 2, 5};
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 5.0);
  CHECK(quantile(x, 0.5) == 3.0);
  CHECK(quantile(x, 0.9) == doctest::Approx(4.6));
}

TEST_CASE("bootstrap ratio") {
  RngStream rng(1, 0);
  std::vector<double> a(500), b(500);
  for (auto& v : a) v = 2.0 + rng.uniform();
  for (auto& v : b) v = 1.0 + rng.uniform();
  auto r = bootstrap_ratio_of_means(a, b, 1000, rng);
  CHECK(r.value == doctest::Approx(2.5 / 1.5).epsilon(0.05));
  // delta-method standard error for comparison
  CHECK(r.std_error > 0.002);
  CHECK(r.std_error < 0.02);
}

TEST_CASE("binned total variation") {
  std::vector<double> a{0, 0, 1, 1}, b{0, 0, 1, 1}, c{1, 1, 1, 1};
  CHECK(binned_total_variation(a, b, 10) == 0.0);
  CHECK(binned_total_variation(a, c, 10) == doctest::Approx(0.5));
}
