#pragma once

namespace tcasim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tcasim
