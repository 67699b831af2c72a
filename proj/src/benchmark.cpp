#include "treeprofile/benchmark.hpp"

#include <chrono>
#include <limits>
#include <sstream>

#include "treeprofile/distprofile.hpp"
#include "treeprofile/sampler.hpp"

namespace treeprofile {

namespace {

std::uint64_t checksum(const DistanceProfileCounts& d) {
  std::uint64_t s = 0;
  for (std::size_t k = 0; k < d.counts.size(); ++k) s += (k + 1) * static_cast<std::uint64_t>(d.counts[k]);
  return s;
}

template <class F>
BenchRow time_it(std::size_t n, const char* name, int repeats, F&& f) {
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t sum = 0;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    auto d = f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    sum = checksum(d);
  }
  return {n, name, best, sum};
}

}  // namespace

std::vector<BenchRow> benchmark_distance_profile(const std::vector<std::size_t>& sizes, std::uint64_t seed,
                                                 std::size_t naive_max, int repeats) {
  GwSampler gw(OffspringDistribution(WeightSequence::geometric(0.5)));
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    RngStream rng(seed, n);
    const OrderedTree t = gw.conditioned(n, rng);
    const Adjacency g = t.adjacency();
    if (n <= naive_max) rows.push_back(time_it(n, "naive", repeats, [&] { return distance_profile_naive(g); }));
    rows.push_back(time_it(n, "fast-serial", repeats, [&] { return distance_profile_fast(g, 1); }));
    rows.push_back(time_it(n, "fast-parallel", repeats, [&] { return distance_profile_fast(g, 0); }));
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "n,algorithm,wall_ms,checksum\n";
  for (const auto& r : rows) out << r.n << ',' << r.algorithm << ',' << r.wall_ms << ',' << r.checksum << '\n';
  return out.str();
}

}  // namespace treeprofile
