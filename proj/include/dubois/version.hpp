#pragma once

namespace dubois {
inline constexpr const char* kVersion = "0.1.0";
}
