#pragma once

namespace fcr {
inline constexpr const char* kVersion = "0.1.0";
}
