#pragma once

namespace xylocc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace xylocc
