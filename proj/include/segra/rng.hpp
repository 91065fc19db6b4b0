#pragma once

#include <cstdint>
#include <vector>

namespace segra {

// splitmix64; fixed algorithm so sampled values are identical across platforms
// (std::uniform_real_distribution makes no such promise).
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // uniform integer in [0, bound), bound > 0
  std::uint64_t below(std::uint64_t bound) {
    // rejection sampling on the top bits keeps the draw unbiased
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }
};

// Decorrelated stream for a (seed, index) pair, e.g. one per Monte-Carlo trial.
inline Rng rng_stream(std::uint64_t seed, std::uint64_t index) {
  Rng mix(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
  mix.next();
  return mix;
}

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace segra
