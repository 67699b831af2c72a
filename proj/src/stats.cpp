#include "treeprofile/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace treeprofile {

EstimateWithError estimate_mean(std::span<const double> samples, std::uint64_t seed) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("an estimate needs at least 2 replications");
  // Welford
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = samples[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (samples[i] - mean);
  }
  const double var = m2 / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), n, seed};
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double h = (static_cast<double>(samples.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

EstimateWithError bootstrap_ratio_of_means(std::span<const double> a, std::span<const double> b,
                                           std::size_t resamples, RngStream& rng) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ratio of means needs nonempty samples");
  auto mean = [](std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); };
  const double value = mean(a) / mean(b);
  std::vector<double> boot;
  boot.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sa += a[rng.index(a.size())];
    for (std::size_t i = 0; i < b.size(); ++i) sb += b[rng.index(b.size())];
    boot.push_back((sa / static_cast<double>(a.size())) / (sb / static_cast<double>(b.size())));
  }
  const auto est = estimate_mean(boot);
  // the spread of the bootstrap replicates is the standard error itself
  return {value, est.std_error * std::sqrt(static_cast<double>(resamples)), resamples, rng.seed()};
}

double binned_total_variation(std::span<const double> a, std::span<const double> b, std::size_t bins) {
  if (a.empty() || b.empty() || bins == 0) throw std::invalid_argument("total variation needs data and bins");
  double lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
  double hi = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
  if (hi <= lo) return 0.0;
  auto hist = [&](std::span<const double> x) {
    std::vector<double> h(bins, 0.0);
    for (double v : x) {
      auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
      h[std::min(k, bins - 1)] += 1.0 / static_cast<double>(x.size());
    }
    return h;
  };
  const auto ha = hist(a), hb = hist(b);
  double s = 0.0;
  for (std::size_t k = 0; k < bins; ++k) s += std::abs(ha[k] - hb[k]);
  return 0.5 * s;
}

}  // namespace treeprofile
