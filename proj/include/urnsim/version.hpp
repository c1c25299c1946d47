#pragma once

namespace urnsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace urnsim
