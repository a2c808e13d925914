#pragma once

namespace mmmi {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mmmi
