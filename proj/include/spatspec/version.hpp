#pragma once

namespace spatspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spatspec
