#include "treeprofile/convolve.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace treeprofile {
namespace {

// Below this many multiply-adds the schoolbook product wins.
constexpr std::size_t kSchoolbookWork = 1u << 14;

struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

// Planner calls are not thread-safe; execution with new arrays is.
std::mutex plan_mutex;

const Plans& plans_for(std::size_t len) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(len);
  if (it != cache.end()) return it->second;
  auto* re = static_cast<double*>(fftw_malloc(sizeof(double) * len));
  auto* cx = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (len / 2 + 1)));
  Plans p;
  int n = static_cast<int>(len);
  p.forward = fftw_plan_dft_r2c_1d(n, re, cx, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_1d(n, cx, re, FFTW_ESTIMATE);
  fftw_free(re);
  fftw_free(cx);
  return cache.emplace(len, p).first->second;
}

struct FftBuffers {
  double* re = nullptr;
  fftw_complex* fa = nullptr;
  fftw_complex* fb = nullptr;
  explicit FftBuffers(std::size_t len, bool two) {
    re = static_cast<double*>(fftw_malloc(sizeof(double) * len));
    fa = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (len / 2 + 1)));
    if (two) fb = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (len / 2 + 1)));
  }
  ~FftBuffers() {
    fftw_free(re);
    fftw_free(fa);
    if (fb) fftw_free(fb);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

std::size_t transform_length(std::size_t out_len) {
  std::size_t len = 16;
  while (len < out_len) len <<= 1;
  return len;
}

template <class T>
void load(double* re, std::size_t len, std::span<const T> x) {
  std::fill(re, re + len, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) re[i] = static_cast<double>(x[i]);
}

// Returns unnormalized inverse transform in buf.re.
void fft_product(FftBuffers& buf, std::size_t len, const Plans& plans, bool square) {
  const std::size_t m = len / 2 + 1;
  fftw_complex* other = square ? buf.fa : buf.fb;
  for (std::size_t i = 0; i < m; ++i) {
    std::complex<double> x(buf.fa[i][0], buf.fa[i][1]);
    std::complex<double> y(other[i][0], other[i][1]);
    auto z = x * y;
    buf.fa[i][0] = z.real();
    buf.fa[i][1] = z.imag();
  }
  fftw_execute_dft_c2r(plans.backward, buf.fa, buf.re);
}

std::int64_t max_abs(std::span<const std::int64_t> x) {
  std::int64_t m = 0;
  for (auto v : x) m = std::max(m, v < 0 ? -v : v);
  return m;
}

bool fft_is_exact(std::span<const std::int64_t> a, std::span<const std::int64_t> b, std::size_t len) {
  double bound = static_cast<double>(max_abs(a)) * static_cast<double>(max_abs(b)) *
                 static_cast<double>(std::min(a.size(), b.size()));
  return bound * static_cast<double>(len) * 0x1p-53 < 0.25;
}

std::vector<std::int64_t> round_out(const double* re, std::size_t out_len, std::size_t len) {
  std::vector<std::int64_t> out(out_len);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = std::llround(re[i] * scale);
  return out;
}

}  // namespace

std::vector<std::int64_t> convolve_schoolbook(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<std::int64_t> out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    const std::int64_t ai = a[i];
    std::int64_t* o = out.data() + i;
    for (std::size_t j = 0; j < b.size(); ++j) o[j] += ai * b[j];
  }
  return out;
}

std::vector<std::int64_t> convolve_counts(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  if (a.size() * b.size() <= kSchoolbookWork || std::min(a.size(), b.size()) <= 32)
    return convolve_schoolbook(a, b);
  const std::size_t len = transform_length(out_len);
  if (!fft_is_exact(a, b, len)) return convolve_schoolbook(a, b);
  const Plans& plans = plans_for(len);
  FftBuffers buf(len, true);
  load(buf.re, len, a);
  fftw_execute_dft_r2c(plans.forward, buf.re, buf.fa);
  load(buf.re, len, b);
  fftw_execute_dft_r2c(plans.forward, buf.re, buf.fb);
  fft_product(buf, len, plans, false);
  return round_out(buf.re, out_len, len);
}

std::vector<std::int64_t> autoconvolve_counts(std::span<const std::int64_t> a) {
  if (a.empty()) return {};
  const std::size_t out_len = 2 * a.size() - 1;
  if (a.size() <= 128) return convolve_schoolbook(a, a);
  const std::size_t len = transform_length(out_len);
  if (!fft_is_exact(a, a, len)) return convolve_schoolbook(a, a);
  const Plans& plans = plans_for(len);
  FftBuffers buf(len, false);
  load(buf.re, len, a);
  fftw_execute_dft_r2c(plans.forward, buf.re, buf.fa);
  fft_product(buf, len, plans, true);
  return round_out(buf.re, out_len, len);
}

std::vector<double> convolve_real(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  std::vector<double> out(out_len, 0.0);
  if (a.size() * b.size() <= kSchoolbookWork) {
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  const std::size_t len = transform_length(out_len);
  const Plans& plans = plans_for(len);
  FftBuffers buf(len, true);
  load(buf.re, len, a);
  fftw_execute_dft_r2c(plans.forward, buf.re, buf.fa);
  load(buf.re, len, b);
  fftw_execute_dft_r2c(plans.forward, buf.re, buf.fb);
  fft_product(buf, len, plans, false);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = buf.re[i] * scale;
  return out;
}

}  // namespace treeprofile
