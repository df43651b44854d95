#pragma once

namespace freemax {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace freemax
