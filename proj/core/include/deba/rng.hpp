#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace deba {

// splitmix64 with the reference constants. Every random choice in the
// toolkit (poison-index selection, weight init, epoch shuffling, test
// fixtures) flows from this generator so that a reimplementation in any
// language reproduces the same streams from the same seed.
//
//   state += 0x9e3779b97f4a7c15
//   z = state
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) by rejection: draw until
  // r >= 2^64 mod bound, then reduce. bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // 53-bit mantissa uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Draws `count` distinct indices from [0, n) by a partial Fisher-Yates
// pass (for i in [0, count): swap idx[i] with idx[i + next_below(n - i)])
// and returns them sorted ascending. Deterministic in the generator state.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count,
                                        SplitMix64& rng);

// In-place Fisher-Yates shuffle, from the back:
// for i in [n-1 .. 1]: swap v[i] with v[next_below(i + 1)].
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace deba
