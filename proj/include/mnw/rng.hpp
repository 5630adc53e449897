// Counter-based splittable RNG. Every draw is a pure function of
// (seed, stream, counter), so the same seed gives bit-identical output
// regardless of thread count or call interleaving.
#pragma once

#include <cmath>
#include <cstdint>

namespace mnw {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer: bijective, strong avalanche
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed + kGolden * mix64(stream + kGolden))), counter_(0) {}

  std::uint64_t next_u64() { return mix64(key_ + kGolden * ++counter_); }

  // uniform in (0,1): 53 mantissa bits offset by half an ulp so 0 never occurs
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // uniform integer in [0, bound); mask rejection keeps the draw unbiased
  std::uint64_t next_below(std::uint64_t bound) {
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      std::uint64_t v = next_u64() & mask;
      if (v < bound) return v;
    }
  }

  // exact Binomial(trials, p) via geometric skips between successes,
  // O(successes) expected; complemented when p > 1/2
  std::int64_t binomial(std::int64_t trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    if (p > 0.5) return trials - binomial(trials, 1.0 - p);
    const double log_q = std::log1p(-p);
    std::int64_t successes = 0;
    double position = 0.0;
    for (;;) {
      double skip = std::floor(std::log(next_unit()) / log_q);
      position += skip + 1.0;
      if (position > static_cast<double>(trials)) break;
      ++successes;
    }
    return successes;
  }

  // exact Poisson(mean) via Knuth's product method, chunked for large means
  std::int64_t poisson(double mean) {
    std::int64_t count = 0;
    while (mean > 0.0) {
      double chunk = mean < 12.0 ? mean : 12.0;
      double limit = std::exp(-chunk);
      double prod = next_unit();
      while (prod > limit) {
        ++count;
        prod *= next_unit();
      }
      mean -= chunk;
    }
    return count;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace mnw
