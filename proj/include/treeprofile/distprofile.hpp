#pragma once

#include <cstdint>

#include "treeprofile/tree.hpp"

namespace treeprofile {

/// Exact distance profile by centroid decomposition in O(n log^2 n).
/// jobs = 0 uses the OpenMP default; jobs = 1 runs the serial path.
DistanceProfileCounts distance_profile_fast(const Adjacency& g, int jobs = 0);
DistanceProfileCounts distance_profile_fast(const OrderedTree& t, int jobs = 0);
DistanceProfileCounts distance_profile_fast(const LabelledTree& t, int jobs = 0);

std::int64_t wiener_fast(const OrderedTree& t, int jobs = 0);
std::int64_t wiener_fast(const LabelledTree& t, int jobs = 0);

/// Centroids in the order they are removed, with their component sizes;
/// exposed for decomposition invariant tests.
struct CentroidTrace {
  std::vector<Vertex> centroid;
  std::vector<std::uint32_t> component_size;
  std::vector<std::uint32_t> level;
};
CentroidTrace centroid_decomposition(const Adjacency& g);

}  // namespace treeprofile
