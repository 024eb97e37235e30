#pragma once

namespace ermlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ermlab
