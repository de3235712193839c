#pragma once

namespace ltqd {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ltqd
