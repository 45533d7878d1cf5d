#pragma once

namespace stablab {

inline constexpr const char* kVersion = "0.1.0";

}
