#pragma once

namespace ciao {

inline constexpr const char* kToolName = "ciao";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace ciao
