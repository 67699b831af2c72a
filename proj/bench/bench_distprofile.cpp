// Naive BFS vs centroid decomposition, serial and OpenMP.
// usage: bench_distprofile [max_log2=17] [seed=1]
#include <cstdlib>
#include <iostream>

#include "treeprofile/benchmark.hpp"

int main(int argc, char** argv) {
  const int max_log2 = argc > 1 ? std::atoi(argv[1]) : 17;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  std::vector<std::size_t> sizes;
  for (int k = 10; k <= max_log2; ++k) sizes.push_back(std::size_t{1} << k);
  std::cout << treeprofile::bench_csv(treeprofile::benchmark_distance_profile(sizes, seed, 1u << 14, 3));
}
