#pragma once

namespace wiretap {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wiretap
