#pragma once

#include "pel/symbol.hpp"

#include <cstdint>
#include <random>

namespace pel {

/// Seeded generator state passed explicitly to every sampler. Uniform draws
/// are built from raw 64-bit engine output so replays are identical across
/// standard library implementations.
class Generator {
 public:
  explicit Generator(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent substream for worker `index` derived from a master seed.
  static Generator substream(std::uint64_t master_seed, std::uint64_t index);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// A continuum token never returned before by this generator.
  ContinuumToken fresh_token() { return ContinuumToken{stream_, next_serial_++}; }

  std::uint64_t stream() const { return stream_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t stream_;
  std::uint64_t next_serial_ = 0;
};

}  // namespace pel
