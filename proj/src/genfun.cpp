#include "treeprofile/genfun.hpp"

#include <algorithm>
#include <cmath>

#include "treeprofile/convolve.hpp"
#include "treeprofile/oracle.hpp"

namespace treeprofile {
namespace {

double factorial_d(int j) { return std::tgamma(static_cast<double>(j) + 1.0); }

RealSeries horner_table(const WeightSequence& ws, int j, const RealSeries& f) {
  const std::size_t top = ws.max_index();
  RealSeries acc(f.order());
  if (top < static_cast<std::size_t>(j)) return acc;
  for (std::size_t k = top + 1; k-- > static_cast<std::size_t>(j);) {
    double ff = 1.0;
    for (int i = 0; i < j; ++i) ff *= static_cast<double>(k) - i;
    acc = acc * f + ws.coefficient(k) * ff;
  }
  return acc;
}

}  // namespace

RealSeries phi_derivative_of(const WeightSequence& ws, int j, const RealSeries& f) {
  if (j < 0) throw std::invalid_argument("negative derivative order");
  if (ws.family() == Family::table) return horner_table(ws, j, f);
  if (!(std::abs(f[0]) < ws.radius())) throw NumericalError("series argument outside radius of convergence");
  const double r = ws.ratio();
  const RealSeries u = f * r;
  const double pre = ws.scale() * std::pow(r, j);
  switch (ws.family()) {
    case Family::geometric: return pow(1.0 - u, -(j + 1.0)) * (pre * factorial_d(j));
    case Family::poisson: {
      // exp needs a zero constant term; factor out e^{u_0}
      RealSeries v = u;
      const double u0 = v[0];
      v[0] = 0.0;
      return exp(v) * (pre * std::exp(u0));
    }
    case Family::linear: return pow(1.0 - u, -(j + 2.0)) * (pre * factorial_d(j + 1));
    case Family::logarithmic: {
      if (j == 0) {
        RealSeries w = 1.0 - u;
        const double w0 = w[0];
        return (log(w * (1.0 / w0)) + std::log(w0)) * (-pre);
      }
      return pow(1.0 - u, -static_cast<double>(j)) * (pre * factorial_d(j - 1));
    }
    default: break;
  }
  throw NumericalError("radius zero");
}

RealSeries solve_A(const WeightSequence& ws, std::size_t N) {
  if (N == 0) return RealSeries(0);
  RealSeries A(1);
  A[1] = ws.coefficient(0);
  std::size_t m = 1;
  while (m < N) {
    m = std::min(2 * m + 1, N);
    A = A.truncated(m);
    const RealSeries phi = phi_derivative_of(ws, 0, A);
    const RealSeries dphi = phi_derivative_of(ws, 1, A);
    const RealSeries num = A - phi.shifted(1);
    const RealSeries den = 1.0 - dphi.shifted(1);
    A -= num * inverse(den);
    A[0] = 0.0;
  }
  return A;
}

RealSeries solve_A(const OffspringDistribution& p, std::size_t N) { return solve_A(p.weights(), N); }

BivariateSeries series_B(const OffspringDistribution& p, std::size_t N, std::size_t K) {
  const RealSeries A = solve_A(p, N);
  const RealSeries zphi1 = phi_derivative_of(p.weights(), 1, A).shifted(1);
  BivariateSeries B(N, K);
  RealSeries row = A;
  for (std::size_t k = 0; k <= K; ++k) {
    B.set_row(k, row);
    if (k < K) row = row * zphi1;
  }
  return B;
}

BivariateSeries series_D(const OffspringDistribution& p, std::size_t N, std::size_t K) {
  const RealSeries A = solve_A(p, N);
  const RealSeries zphi1 = phi_derivative_of(p.weights(), 1, A).shifted(1);
  const RealSeries zphi2 = phi_derivative_of(p.weights(), 2, A).shifted(1);
  const RealSeries inv = inverse(1.0 - zphi1);
  std::vector<RealSeries> brow;
  brow.reserve(K + 1);
  brow.push_back(A);
  for (std::size_t k = 1; k <= K; ++k) brow.push_back(brow.back() * zphi1);

  BivariateSeries D(N, K);
  for (std::size_t k = 0; k <= K; ++k) {
    RealSeries num(N);
    if (k == 0) num += A;
    if (k >= 1) num += (zphi1 * brow[k - 1]) * 2.0;
    if (k >= 2) {
      RealSeries sq(N);
      for (std::size_t j = 0; j <= k - 2; ++j) sq += brow[j] * brow[k - 2 - j];
      num += zphi2 * sq;
    }
    D.set_row(k, num * inv);
  }
  return D;
}

ExpectedProfiles expected_profiles(const OffspringDistribution& p, std::size_t n) {
  if (n == 0) throw std::invalid_argument("tree size must be at least 1");
  const std::size_t K = n - 1;
  const auto B = series_B(p, n, K);
  const auto D = series_D(p, n, K);
  const double an = B(n, 0);
  if (!(an > 0.0))
    throw NumericalError("size n=" + std::to_string(n) + " is unreachable for this offspring law (span " +
                         std::to_string(p.span()) + ")");
  ExpectedProfiles out;
  for (std::size_t k = 0; k <= K; ++k) {
    out.height.push_back(B(n, k) / an);
    out.distance.push_back(D(n, k) / an);
  }
  return out;
}

CefSeries series_CEF_at(const OffspringDistribution& p, Complex x, Complex y, std::size_t N) {
  const WeightSequence& ws = p.weights();
  if (ws.family() != Family::table && !std::isfinite(ws.gf_derivative(4, 1.0)))
    throw NumericalError("offspring law lacks a finite fourth moment");
  CefSeries out;
  out.A = solve_A(p, N);
  const ComplexSeries A = to_complex(out.A);
  ComplexSeries zp[5];
  for (int j = 1; j <= 4; ++j) zp[j] = to_complex(phi_derivative_of(ws, j, out.A).shifted(1));
  const ComplexSeries& z1 = zp[1];
  const ComplexSeries& z2 = zp[2];
  const ComplexSeries& z3 = zp[3];
  const ComplexSeries& z4 = zp[4];

  const bool conjugate = y == std::conj(x) && std::abs(std::abs(x) - 1.0) < 1e-15;
  const Complex one(1.0);
  const Complex xy = conjugate ? one : x * y;
  const Complex x2y = x * xy, xy2 = y * xy, x2y2 = xy * xy;

  const ComplexSeries inv1 = inverse(one - z1);
  const ComplexSeries Bx = A * inverse(one - z1 * x);
  const ComplexSeries By = A * inverse(one - z1 * y);
  const ComplexSeries BxBy = Bx * By;
  const ComplexSeries Bx2 = Bx * Bx;
  const ComplexSeries By2 = By * By;
  const ComplexSeries Dx = (z2 * Bx2 * (x * x) + z1 * Bx * (2.0 * x) + A) * inv1;
  const ComplexSeries Dy = (z2 * By2 * (y * y) + z1 * By * (2.0 * y) + A) * inv1;
  const ComplexSeries invxy = conjugate ? inv1 : inverse(one - z1 * xy);
  out.C = (z2 * BxBy * xy + Bx + By - A) * invxy;
  const ComplexSeries& C = out.C;

  const ComplexSeries z2C = z2 * C;
  const ComplexSeries z1C = z1 * C;
  const ComplexSeries z2BxBy = z2 * BxBy;
  ComplexSeries numE = z2 * Dx * By * y + z2C * Bx * (2.0 * x2y) + z3 * Bx2 * By * x2y + z1C * (2.0 * xy) +
                       z2BxBy * (2.0 * xy) + z1 * By * y + Dx;
  out.E = numE * inverse(one - z1 * y);
  ComplexSeries Eyx;
  if (conjugate) {
    Eyx = out.E;
    for (std::size_t i = 0; i <= N; ++i) Eyx[i] = std::conj(Eyx[i]);
  } else {
    ComplexSeries numEyx = z2 * Dy * Bx * x + z2C * By * (2.0 * xy2) + z3 * By2 * Bx * xy2 + z1C * (2.0 * xy) +
                           z2BxBy * (2.0 * xy) + z1 * Bx * x + Dy;
    Eyx = numEyx * inverse(one - z1 * x);
  }
  const ComplexSeries& Exy = out.E;

  ComplexSeries numF = z2 * Dx * Dy;
  numF += z2 * Exy * By * (2.0 * y * y);
  numF += z3 * Dx * By2 * (y * y);
  numF += z1 * Exy * (2.0 * y);
  numF += z2 * Dx * By * (2.0 * y);
  numF += z2 * Eyx * Bx * (2.0 * x * x);
  numF += z3 * Bx2 * Dy * (x * x);
  numF += z3 * C * BxBy * (4.0 * x2y2);
  numF += z2C * C * (2.0 * x2y2);
  numF += z4 * Bx2 * By2 * x2y2;
  numF += z2C * Bx * (4.0 * x2y);
  numF += z3 * Bx2 * By * (2.0 * x2y);
  numF += z1 * Eyx * (2.0 * x);
  numF += z2 * Dy * Bx * (2.0 * x);
  numF += z2C * By * (4.0 * xy2);
  numF += z3 * Bx * By2 * (2.0 * xy2);
  numF += z1C * (4.0 * xy);
  numF += z2BxBy * (4.0 * xy);
  numF += Dx + Dy - A;
  out.F = numF * inv1;
  return out;
}

FourierSecondMoments fourier_second_moments(const OffspringDistribution& p, std::size_t n, double xi) {
  const auto s = series_CEF_at(p, std::polar(1.0, xi), n);
  const double an = s.A[n];
  if (!(an > 0.0)) throw NumericalError("size n=" + std::to_string(n) + " is unreachable for this offspring law");
  return {s.C[n].real() / an, s.F[n].real() / an};
}

std::vector<double> power_truncated(std::span<const double> poly, std::size_t power, std::size_t max_degree) {
  std::vector<double> result{1.0};
  std::vector<double> base(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(std::min(poly.size(), max_degree + 1)));
  auto trim = [&](std::vector<double> v) {
    if (v.size() > max_degree + 1) v.resize(max_degree + 1);
    for (auto& c : v) c = std::max(c, 0.0);
    return v;
  };
  while (power > 0) {
    if (power & 1) result = trim(convolve_real(result, base));
    power >>= 1;
    if (power) base = trim(convolve_real(base, base));
  }
  result.resize(max_degree + 1, 0.0);
  return result;
}

double exact_dwass_size_prob(const OffspringDistribution& p, std::size_t n, std::size_t k) {
  if (k == 0 || k > n) return 0.0;
  const auto probs = p.probabilities();
  const auto pw = power_truncated(probs, n, n - k);
  return static_cast<double>(k) / static_cast<double>(n) * pw[n - k];
}

RealSeries psi_of(const WeightSequence& w, const RealSeries& f) {
  const double s = w.scale(), r = w.ratio();
  switch (w.family()) {
    case Family::table: {
      RealSeries acc(f.order());
      double fact = 1.0;
      std::vector<double> c;
      for (std::size_t k = 0; k <= w.max_index(); ++k) {
        if (k > 0) fact *= static_cast<double>(k);
        c.push_back(w.coefficient(k) / fact);
      }
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * f + c[k];
      return acc;
    }
    case Family::geometric: {
      RealSeries v = f * r;
      const double v0 = v[0];
      v[0] = 0.0;
      return exp(v) * (s * std::exp(v0));
    }
    case Family::factorial: return inverse(1.0 - f * r) * s;
    case Family::shifted_factorial: {
      RealSeries v = 1.0 - f * r;
      const double v0 = v[0];
      return (log(v * (1.0 / v0)) + std::log(v0)) * (-s);
    }
    default: break;
  }
  throw std::invalid_argument("psi_of expects an unrooted weight family");
}

UnrootedGfReport unrooted_gf_report(const WeightSequence& w, std::size_t N) {
  constexpr std::size_t kOracleLimit = 7;
  const auto pair = unrooted_to_rooted(w);
  const RealSeries A = solve_A(pair.phi, N);
  const RealSeries psiA = psi_of(w, A);
  const RealSeries A2 = A * A;

  UnrootedGfReport rep{0.0, 0.0, 0.0, RealSeries(N)};
  RealSeries& B = rep.B;
  double fact = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    fact *= static_cast<double>(n);
    const double integrated = psiA[n - 1] / static_cast<double>(n);
    if (n <= kOracleLimit) {
      const double bn = n == 1 ? w.coefficient(0) : labelled_total_weight(w, n);
      B[n] = bn / fact;
      const double scale = std::max(std::abs(B[n]), std::abs(integrated));
      if (scale > 0.0) rep.max_oracle_mismatch = std::max(rep.max_oracle_mismatch, std::abs(B[n] - integrated) / scale);
    } else {
      B[n] = integrated;
    }
  }
  auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
  };
  for (std::size_t n = 1; n <= N; ++n) {
    rep.max_residual_BA = std::max(rep.max_residual_BA, rel(static_cast<double>(n) * B[n], psiA[n - 1]));
    rep.max_residual_BAA = std::max(rep.max_residual_BAA, rel(2.0 * static_cast<double>(n - 1) * B[n], A2[n]));
  }
  return rep;
}

double unrooted_gf_check(const WeightSequence& w, std::size_t N) {
  const auto rep = unrooted_gf_report(w, N);
  return std::max({rep.max_residual_BA, rep.max_residual_BAA, rep.max_oracle_mismatch});
}

}  // namespace treeprofile
