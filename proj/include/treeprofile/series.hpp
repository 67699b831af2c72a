#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace treeprofile {

namespace detail {
template <class T>
struct Kahan {
  T sum{};
  T comp{};
  void add(T x) {
    T y = x - comp;
    T t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};
}  // namespace detail

/// Power series c_0 + c_1 z + ... + c_N z^N, arithmetic exact modulo z^{N+1}.
template <class T>
class TruncatedSeries {
 public:
  TruncatedSeries() : c_(1, T{}) {}
  explicit TruncatedSeries(std::size_t order) : c_(order + 1, T{}) {}
  TruncatedSeries(std::size_t order, std::vector<T> coeffs) : c_(std::move(coeffs)) { c_.resize(order + 1, T{}); }

  static TruncatedSeries constant(T value, std::size_t order) {
    TruncatedSeries s(order);
    s.c_[0] = value;
    return s;
  }
  static TruncatedSeries z(std::size_t order) {
    TruncatedSeries s(order);
    if (order >= 1) s.c_[1] = T(1);
    return s;
  }

  std::size_t order() const { return c_.size() - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T at(std::size_t i) const { return i < c_.size() ? c_[i] : T{}; }

  TruncatedSeries truncated(std::size_t order) const {
    std::vector<T> c(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(std::min(order + 1, c_.size())));
    return TruncatedSeries(order, std::move(c));
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.at(i);
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.at(i);
    return *this;
  }
  TruncatedSeries& operator*=(T s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, T s) { return a *= s; }
  friend TruncatedSeries operator*(T s, TruncatedSeries a) { return a *= s; }
  friend TruncatedSeries operator-(TruncatedSeries a) { return a *= T(-1); }
  TruncatedSeries operator+(T s) const {
    TruncatedSeries r = *this;
    r.c_[0] += s;
    return r;
  }
  friend TruncatedSeries operator-(T s, const TruncatedSeries& a) {
    TruncatedSeries r = -a;
    r.c_[0] += s;
    return r;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    const std::size_t n = std::min(a.order(), b.order());
    TruncatedSeries r(n);
    for (std::size_t k = 0; k <= n; ++k) {
      detail::Kahan<T> acc;
      for (std::size_t i = 0; i <= k; ++i) acc.add(a.c_[i] * b.c_[k - i]);
      r.c_[k] = acc.sum;
    }
    return r;
  }

  /// Multiplication by z^m.
  TruncatedSeries shifted(std::size_t m) const {
    TruncatedSeries r(order());
    for (std::size_t i = m; i <= order(); ++i) r.c_[i] = c_[i - m];
    return r;
  }

  TruncatedSeries derivative() const {
    TruncatedSeries r(order());
    for (std::size_t i = 1; i <= order(); ++i) r.c_[i - 1] = T(static_cast<double>(i)) * c_[i];
    return r;
  }
  /// Antiderivative with zero constant term.
  TruncatedSeries integral() const {
    TruncatedSeries r(order());
    for (std::size_t i = 1; i <= order(); ++i) r.c_[i] = c_[i - 1] / T(static_cast<double>(i));
    return r;
  }

 private:
  std::vector<T> c_;
};

/// 1/f; requires f_0 != 0.
template <class T>
TruncatedSeries<T> inverse(const TruncatedSeries<T>& f) {
  if (f[0] == T{}) throw std::domain_error("series inverse needs a nonzero constant term");
  const std::size_t n = f.order();
  TruncatedSeries<T> h(n);
  const T inv0 = T(1) / f[0];
  h[0] = inv0;
  for (std::size_t k = 1; k <= n; ++k) {
    detail::Kahan<T> acc;
    for (std::size_t i = 1; i <= k; ++i) acc.add(f[i] * h[k - i]);
    h[k] = -acc.sum * inv0;
  }
  return h;
}

/// exp(g); requires g_0 = 0.
template <class T>
TruncatedSeries<T> exp(const TruncatedSeries<T>& g) {
  if (g[0] != T{}) throw std::domain_error("series exp needs a zero constant term");
  const std::size_t n = g.order();
  TruncatedSeries<T> f(n);
  f[0] = T(1);
  for (std::size_t k = 1; k <= n; ++k) {
    detail::Kahan<T> acc;
    for (std::size_t i = 1; i <= k; ++i) acc.add(T(static_cast<double>(i)) * g[i] * f[k - i]);
    f[k] = acc.sum / T(static_cast<double>(k));
  }
  return f;
}

/// log(f) with f_0 = 1.
template <class T>
TruncatedSeries<T> log(const TruncatedSeries<T>& f) {
  if (f[0] != T(1)) throw std::domain_error("series log needs constant term 1");
  return (f.derivative() * inverse(f)).integral();
}

/// f^alpha for f_0 > 0 real (f_0^alpha taken as the principal power).
template <class T>
TruncatedSeries<T> pow(const TruncatedSeries<T>& f, double alpha) {
  if (f[0] == T{}) throw std::domain_error("series power needs a nonzero constant term");
  const std::size_t n = f.order();
  TruncatedSeries<T> h(n);
  h[0] = std::pow(f[0], T(alpha));
  const T inv0 = T(1) / f[0];
  for (std::size_t k = 1; k <= n; ++k) {
    detail::Kahan<T> acc;
    for (std::size_t i = 1; i <= k; ++i)
      acc.add(T(alpha * static_cast<double>(i) - static_cast<double>(k - i)) * f[i] * h[k - i]);
    h[k] = acc.sum * inv0 / T(static_cast<double>(k));
  }
  return h;
}

template <class T>
TruncatedSeries<std::complex<T>> to_complex(const TruncatedSeries<T>& f) {
  TruncatedSeries<std::complex<T>> r(f.order());
  for (std::size_t i = 0; i <= f.order(); ++i) r[i] = f[i];
  return r;
}

/// Coefficients c(n, k), 0 <= n <= N, 0 <= k <= K.
class BivariateSeries {
 public:
  BivariateSeries(std::size_t n_order, std::size_t k_order)
      : n_(n_order), k_(k_order), c_((n_order + 1) * (k_order + 1), 0.0) {}
  std::size_t n_order() const { return n_; }
  std::size_t k_order() const { return k_; }
  double& operator()(std::size_t n, std::size_t k) { return c_[n * (k_ + 1) + k]; }
  double operator()(std::size_t n, std::size_t k) const { return c_[n * (k_ + 1) + k]; }
  /// The z-series multiplying x^k.
  TruncatedSeries<double> row(std::size_t k) const {
    TruncatedSeries<double> r(n_);
    for (std::size_t n = 0; n <= n_; ++n) r[n] = (*this)(n, k);
    return r;
  }
  void set_row(std::size_t k, const TruncatedSeries<double>& s) {
    for (std::size_t n = 0; n <= n_; ++n) (*this)(n, k) = s.at(n);
  }

 private:
  std::size_t n_, k_;
  std::vector<double> c_;
};

}  // namespace treeprofile
