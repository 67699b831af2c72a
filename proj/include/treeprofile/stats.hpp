#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "treeprofile/rng.hpp"

namespace treeprofile {

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(reps)
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

EstimateWithError estimate_mean(std::span<const double> samples, std::uint64_t seed = 0);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> samples, double q);

/// mean(a) / mean(b) with a bootstrap standard error over independent resampling of a and b.
EstimateWithError bootstrap_ratio_of_means(std::span<const double> a, std::span<const double> b,
                                           std::size_t resamples, RngStream& rng);

/// Half the L1 distance between histograms of a and b on a common uniform grid.
double binned_total_variation(std::span<const double> a, std::span<const double> b, std::size_t bins);

}  // namespace treeprofile
