#pragma once

namespace ebell {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ebell
