#include "deba/rng.hpp"

#include <algorithm>
#include <numeric>

#include "deba/errors.hpp"

namespace deba {

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t count,
                                        SplitMix64& rng) {
  if (count > n) throw InvalidInput("sample_indices: count exceeds population");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace deba
