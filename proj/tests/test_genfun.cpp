#include <doctest.h>

#include <cmath>
#include <complex>

#include "brute.hpp"
#include "treeprofile/genfun.hpp"
#include "treeprofile/oracle.hpp"

using namespace treeprofile;

namespace {
const OffspringDistribution geo(WeightSequence::geometric(0.5));
const OffspringDistribution bin(WeightSequence::from_table({0.25, 0.5, 0.25}));
}  // namespace

TEST_CASE("series arithmetic") {
  auto z = RealSeries::z(6);
  auto one = RealSeries::constant(1.0, 6);
  auto inv = inverse(one - z);  // 1/(1-z)
  for (int k = 0; k <= 6; ++k) CHECK(inv[k] == doctest::Approx(1.0));
  auto e = exp(z);
  double f = 1;
  for (int k = 0; k <= 6; ++k) {
    if (k) f *= k;
    CHECK(e[k] == doctest::Approx(1.0 / f));
  }
  auto l = log(e);
  CHECK(l[1] == doctest::Approx(1.0));
  CHECK(std::abs(l[3]) < 1e-14);
  auto s = pow(one - z, 0.5);  // sqrt(1-z) = 1 - z/2 - z^2/8 - z^3/16
  CHECK(s[1] == doctest::Approx(-0.5));
  CHECK(s[2] == doctest::Approx(-0.125));
  CHECK(s[3] == doctest::Approx(-0.0625));
}

TEST_CASE("A solves the fixed point") {
  auto a = solve_A(geo, 40);
  // A = 1 - sqrt(1-z): a_n = Catalan(n-1) / 2^{2n-1}
  CHECK(a[1] == doctest::Approx(0.5));
  CHECK(a[2] == doctest::Approx(0.125));
  CHECK(a[3] == doctest::Approx(0.0625));
  for (unsigned n = 1; n <= 40; ++n) CHECK(a[n] == doctest::Approx(brute::catalan(n - 1) / std::ldexp(1.0, 2 * n - 1)));
  auto b = solve_A(bin, 10);
  CHECK(b[1] == doctest::Approx(0.25));
  CHECK(b[2] == doctest::Approx(0.125));  // p1 p0
  CHECK(b[3] == doctest::Approx(5.0 / 64.0));  // path 1/16 + cherry 1/64
  // the same from enumeration
  for (std::size_t n = 1; n <= 9; ++n) {
    double s = 0;
    for (const auto& t : enumerate_ordered(n)) s += ordered_weight(t, bin);
    CHECK(b[n] == doctest::Approx(s).epsilon(1e-12));
  }
  auto p = solve_A(OffspringDistribution(WeightSequence::poisson(1.0)), 6);
  CHECK(p[1] == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("critical size law sums to one and decays like n^{-3/2}") {
  const std::size_t N = 4000;
  auto a = solve_A(geo, N);
  double s = 0;
  for (std::size_t n = 1; n <= N; ++n) s += a[n];
  // tail beyond N: sum_{n>N} c n^{-3/2} ~ 2c N^{-1/2}, c from a_N N^{3/2}
  const double c = a[N] * std::pow(double(N), 1.5);
  CHECK(std::abs(s + 2 * c / std::sqrt(double(N)) - 1.0) < 1e-4);
  const double r = (a[2000] * std::pow(2000.0, 1.5)) / (a[1000] * std::pow(1000.0, 1.5));
  CHECK(std::abs(r - 1.0) < 0.03);
}

TEST_CASE("expected profiles, small cases") {
  auto e = expected_profiles(geo, 3);
  CHECK(e.distance[1] == doctest::Approx(4.0));
  CHECK(e.distance[2] == doctest::Approx(2.0));
  CHECK(e.height[1] == doctest::Approx(1.5));
  CHECK(e.height[2] == doctest::Approx(0.5));
  for (std::size_t n = 1; n <= 12; ++n) {
    auto x = expected_profiles(bin, n);
    CHECK(x.distance[0] == doctest::Approx(double(n)));
  }
  CHECK_THROWS(expected_profiles(OffspringDistribution(WeightSequence::from_table({0.5, 0, 0.5})), 4));
}

TEST_CASE("expected profiles match enumeration") {
  for (const auto* p : {&geo, &bin}) {
    for (std::size_t n = 1; n <= 9; ++n) {
      if (p->span() == 2 && n % 2 == 0) continue;
      const auto law = exact_conditioned_law(*p, n);
      std::vector<double> eh(n, 0.0), ed(n, 0.0);
      for (std::size_t i = 0; i < law.size(); ++i) {
        const auto d = brute::pair_distances(law.items[i]);
        const auto depth = law.items[i].depths();
        for (std::size_t k = 0; k < d.size(); ++k) ed[k] += law.probability(i) * double(d[k]);
        for (auto h : depth) eh[h] += law.probability(i);
      }
      const auto x = expected_profiles(*p, n);
      double sh = 0, sd = 0;
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(std::abs(x.height[k] - eh[k]) <= 1e-10 * std::max(1.0, eh[k]));
        CHECK(std::abs(x.distance[k] - ed[k]) <= 1e-10 * std::max(1.0, ed[k]));
        sh += x.height[k];
        sd += x.distance[k];
      }
      CHECK(std::abs(sh - double(n)) < 1e-9);
      CHECK(std::abs(sd - double(n * n)) < 1e-9 * double(n * n));
    }
  }
}

TEST_CASE("bivariate series D row zero") {
  auto A = solve_A(geo, 12);
  auto D = series_D(geo, 12, 12);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(D(n, 0) / A[n] == doctest::Approx(double(n)));
  auto B = series_B(geo, 12, 12);
  for (std::size_t n = 1; n <= 12; ++n) CHECK(B(n, 0) / A[n] == doctest::Approx(1.0));
}

TEST_CASE("C, E, F at x = 1") {
  auto s = series_CEF_at(geo, Complex(1.0, 0.0), 20);
  for (std::size_t n = 1; n <= 20; ++n) {
    const double nd = double(n);
    CHECK(s.C[n].real() / s.A[n] == doctest::Approx(nd * nd));
    CHECK(s.F[n].real() / s.A[n] == doctest::Approx(nd * nd * nd * nd));
  }
}

TEST_CASE("Fourier second moments match enumeration") {
  for (const auto* p : {&geo, &bin}) {
    for (std::size_t n = 1; n <= 7; ++n) {
      if (p->span() == 2 && n % 2 == 0) continue;
      const auto law = exact_conditioned_law(*p, n);
      double eh = 0, ed = 0;
      for (std::size_t i = 0; i < law.size(); ++i) {
        const auto d = brute::pair_distances(law.items[i]);
        std::complex<double> sd = 0, sh = 0;
        for (std::size_t k = 0; k < d.size(); ++k) sd += double(d[k]) * std::polar(1.0, double(k));
        for (auto h : law.items[i].depths()) sh += std::polar(1.0, double(h));
        ed += law.probability(i) * std::norm(sd);
        eh += law.probability(i) * std::norm(sh);
      }
      const auto m = fourier_second_moments(*p, n, 1.0);
      CHECK(m.distance == doctest::Approx(ed).epsilon(1e-10));
      CHECK(m.height == doctest::Approx(eh).epsilon(1e-10));
    }
  }
}

TEST_CASE("Dwass formula") {
  auto a = solve_A(geo, 20);
  for (std::size_t n = 1; n <= 10; ++n) CHECK(exact_dwass_size_prob(geo, n, 1) == doctest::Approx(a[n]));
  for (std::size_t n = 1; n <= 10; ++n) CHECK(exact_dwass_size_prob(geo, n, n) == doctest::Approx(std::pow(0.5, double(n))));
  CHECK(exact_dwass_size_prob(geo, 4, 2) == doctest::Approx(5.0 / 64.0));
  CHECK(exact_dwass_size_prob(geo, 4, 2) == doctest::Approx(a[1] * a[3] + a[2] * a[2] + a[3] * a[1]));
}

TEST_CASE("unrooted generating function identities") {
  for (const auto& w : {WeightSequence::factorial_unrooted(),
                        WeightSequence(WeightKind::unrooted_w, Family::geometric, 1.0, 1.0),
                        WeightSequence::from_table({0, 1, 0, 1}, WeightKind::unrooted_w)}) {
    const auto r = unrooted_gf_report(w, 30);
    CHECK(r.max_residual_BA <= 1e-10);
    CHECK(r.max_residual_BAA <= 1e-10);
    CHECK(r.max_oracle_mismatch <= 1e-10);
  }
  CHECK(unrooted_gf_check(WeightSequence::factorial_unrooted(), 1) == 0.0);
  // n! [z^n] B equals the Pruefer total weight
  const auto w = WeightSequence::factorial_unrooted();
  const auto r = unrooted_gf_report(w, 7);
  double f = 1;
  for (std::size_t n = 1; n <= 7; ++n) {
    f *= double(n);
    double brute_total = 0;
    if (n == 1) brute_total = w.coefficient(0);
    else
      for (const auto& t : enumerate_labelled(n)) brute_total += labelled_weight(t, w);
    CHECK(f * r.B[n] == doctest::Approx(brute_total).epsilon(1e-10));
  }
}
