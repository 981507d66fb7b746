#include "deba/hash.hpp"

#include "deba/errors.hpp"

namespace deba {

std::string hash_to_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::uint64_t hex_to_hash(std::string_view hex) {
  if (hex.size() != 16) throw FormatError("hash must be 16 hex digits");
  std::uint64_t h = 0;
  for (char c : hex) {
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else throw FormatError("hash must be lowercase hex");
    h = (h << 4) | static_cast<std::uint64_t>(d);
  }
  return h;
}

}  // namespace deba
