#pragma once

namespace relcp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace relcp
