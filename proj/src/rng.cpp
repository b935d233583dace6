#include "pel/rng.hpp"

#include <array>

namespace pel {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
  const std::array<std::uint32_t, 4> words = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Generator::Generator(std::uint64_t seed, std::uint64_t stream)
    : engine_(seeded_engine(seed, stream)), stream_(stream) {}

Generator Generator::substream(std::uint64_t master_seed, std::uint64_t index) {
  return Generator(master_seed, index + 1);
}

double Generator::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Generator::below(std::uint64_t bound) {
  // Rejection sampling avoids modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

}  // namespace pel
