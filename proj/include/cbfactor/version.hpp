#pragma once

namespace cbf {

inline constexpr const char* kToolName = "cbfactor";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace cbf
