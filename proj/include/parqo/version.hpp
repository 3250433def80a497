#pragma once

namespace parqo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace parqo
