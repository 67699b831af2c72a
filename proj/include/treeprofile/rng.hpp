#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace treeprofile {

/// Seeded random stream. Identical (seed, stream) pairs reproduce identical draws;
/// distinct stream ids are seeded through independent seed_seq inputs.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t draws() const { return draws_; }

  engine_type& engine() { return engine_; }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on {0, ..., n-1}; n > 0.
  std::size_t index(std::size_t n);
  /// Child stream derived from this stream's seed with a new id.
  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t draws_ = 0;
  engine_type engine_;
};

}  // namespace treeprofile
