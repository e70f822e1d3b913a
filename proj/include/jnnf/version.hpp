#pragma once

namespace jnnf {

inline constexpr const char* kToolVersion = "0.1.0";

}
