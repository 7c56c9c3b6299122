#pragma once

namespace fmc {

inline constexpr const char* kToolName = "fmcompare";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace fmc
