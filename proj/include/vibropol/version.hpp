#pragma once

namespace vibropol {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vibropol
