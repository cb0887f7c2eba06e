#pragma once

namespace nclab {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace nclab
