#pragma once

namespace thermolimit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace thermolimit
