#pragma once

#include <cstdint>

namespace logmap {

// splitmix64: tiny, fast, and fully specified, so seeded runs are
// bit-reproducible across platforms and standard-library versions
// (std::mt19937's distributions are not).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed from a base seed and task coordinates,
// so parallel workers can each own a generator without sharing state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t item = 0) {
  SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  mix.next();
  std::uint64_t s = mix.next() ^ (0xbf58476d1ce4e5b9ULL * (item + 1));
  SplitMix64 mix2(s);
  mix2.next();
  return mix2.next();
}

}  // namespace logmap
