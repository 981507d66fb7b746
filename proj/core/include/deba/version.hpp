#pragma once

namespace deba {

inline constexpr const char* kToolVersion = "deba/0.1.0";

}  // namespace deba
