#pragma once

namespace ois {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ois
