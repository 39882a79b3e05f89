#pragma once

namespace acd {
inline constexpr const char* kVersion = "1.0.0";
}
