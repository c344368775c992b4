#pragma once

namespace teamdims {

inline constexpr const char* kVersion = "0.1.0";

} // namespace teamdims
