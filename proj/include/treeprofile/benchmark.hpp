#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace treeprofile {

struct BenchRow {
  std::size_t n;
  std::string algorithm;  // naive, fast-serial, fast-parallel
  double wall_ms;
  std::uint64_t checksum;  // sum_k (k+1) Lambda(k), wrapping
};

/// Times the distance-profile algorithms on one geometric conditioned tree per
/// size. The naive BFS is skipped above naive_max. Each timing is the minimum
/// over `repeats` runs.
std::vector<BenchRow> benchmark_distance_profile(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                                 std::size_t naive_max = 1u << 14, int repeats = 1);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace treeprofile
