#pragma once

namespace hitr {

inline constexpr const char* kToolName = "hitr";
inline constexpr const char* kVersion = "0.1.0";

} // namespace hitr
