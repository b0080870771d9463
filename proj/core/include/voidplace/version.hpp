#pragma once

namespace voidplace {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace voidplace
