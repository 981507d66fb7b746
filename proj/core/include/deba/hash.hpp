#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace deba {

// 64-bit FNV-1a. Used for config hashes, trigger digests and manifest
// integrity checks; chosen for its one-line portable definition, not for
// cryptographic strength.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
  return fnv1a64(s.data(), s.size(), h);
}

// Zero-padded lowercase hex, the on-disk spelling of every hash.
std::string hash_to_hex(std::uint64_t h);
std::uint64_t hex_to_hash(std::string_view hex);  // FormatError on bad input

}  // namespace deba
