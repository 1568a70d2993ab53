#pragma once

namespace greycast {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace greycast
