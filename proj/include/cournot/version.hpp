#pragma once

namespace cournot {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cournot
