#pragma once

namespace cqed {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace cqed
