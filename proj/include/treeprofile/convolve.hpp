#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace treeprofile {

/// Exact integer convolution. Short inputs use the schoolbook product; long ones
/// go through a real FFT with rounding, provided the rounding error bound
/// (max output bound * transform length * 2^-53) stays below 1/4.
std::vector<std::int64_t> convolve_counts(std::span<const std::int64_t> a, std::span<const std::int64_t> b);
/// a ⊛ a with one forward transform.
std::vector<std::int64_t> autoconvolve_counts(std::span<const std::int64_t> a);

std::vector<std::int64_t> convolve_schoolbook(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

/// Real-valued FFT convolution without rounding (used for probability arrays).
std::vector<double> convolve_real(std::span<const double> a, std::span<const double> b);

}  // namespace treeprofile
