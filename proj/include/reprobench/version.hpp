#pragma once

namespace reprobench {
inline constexpr const char* kToolName = "reprobench";
inline constexpr const char* kToolVersion = "0.1.0";
}  // namespace reprobench
