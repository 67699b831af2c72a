#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "treeprofile/series.hpp"
#include "treeprofile/weights.hpp"

namespace treeprofile {

using Complex = std::complex<double>;
using RealSeries = TruncatedSeries<double>;
using ComplexSeries = TruncatedSeries<Complex>;

/// Phi^{(j)}(f(z)) for the generating function Phi of `ws`; f_0 must lie inside
/// the radius of convergence.
RealSeries phi_derivative_of(const WeightSequence& ws, int j, const RealSeries& f);

/// A(z) = z Phi(A(z)) through order N. For a probability law a_n = P(|GW| = n);
/// for general weights a_n is the total weight of ordered trees with n vertices.
RealSeries solve_A(const WeightSequence& ws, std::size_t N);
RealSeries solve_A(const OffspringDistribution& p, std::size_t N);

/// B(z,x) = A / (1 - x z Phi'(A)) through z^N, x^K.
BivariateSeries series_B(const OffspringDistribution& p, std::size_t N, std::size_t K);
/// Generating function of sum_{v,w} x^{d(v,w)}, through z^N, x^K.
BivariateSeries series_D(const OffspringDistribution& p, std::size_t N, std::size_t K);

/// Exact E L_n(k) and E Lambda_n(k) for the conditioned tree of size n.
struct ExpectedProfiles {
  std::vector<double> height;    // k = 0..n-1
  std::vector<double> distance;  // k = 0..n-1
};
ExpectedProfiles expected_profiles(const OffspringDistribution& p, std::size_t n);

struct CefSeries {
  RealSeries A;
  ComplexSeries C;
  ComplexSeries E;
  ComplexSeries F;
};
/// C(z,x,y), E(z,x,y), F(z,x,y) through z^N. When y == conj(x) and |x| = 1 the
/// product xy is replaced by exactly 1.
CefSeries series_CEF_at(const OffspringDistribution& p, Complex x, Complex y, std::size_t N);
inline CefSeries series_CEF_at(const OffspringDistribution& p, Complex x, std::size_t N) {
  return series_CEF_at(p, x, std::conj(x), N);
}

/// E|sum_k L_n(k) e^{i xi k}|^2 and E|sum_k Lambda_n(k) e^{i xi k}|^2.
struct FourierSecondMoments {
  double height;
  double distance;
};
FourierSecondMoments fourier_second_moments(const OffspringDistribution& p, std::size_t n, double xi);

/// Coefficients 0..max_degree of poly^power (negative rounding residue clamped to 0).
std::vector<double> power_truncated(std::span<const double> poly, std::size_t power, std::size_t max_degree);

/// Probability that a forest of k independent GW trees has n vertices in total.
double exact_dwass_size_prob(const OffspringDistribution& p, std::size_t n, std::size_t k);

/// Psi(f(z)) with Psi(s) = sum_k w_k s^k / k!.
RealSeries psi_of(const WeightSequence& w, const RealSeries& f);

struct UnrootedGfReport {
  double max_residual_BA;     // B' - Psi(A)
  double max_residual_BAA;    // 2zB' - 2B - A^2
  double max_oracle_mismatch;  // |n! [z^n]B - b_n| relative, n <= oracle limit
  RealSeries B;
};
/// Egf B of labelled unrooted tree weights: seeded from enumeration for
/// n <= 7, extended by integrating Psi(A). Residuals are relative to the
/// largest term of each coefficient identity.
UnrootedGfReport unrooted_gf_report(const WeightSequence& w, std::size_t N);
double unrooted_gf_check(const WeightSequence& w, std::size_t N);

}  // namespace treeprofile
