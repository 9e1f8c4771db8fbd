#pragma once

namespace segeval {

#ifndef SEGEVAL_VERSION
#define SEGEVAL_VERSION "0.0.0-dev"
#endif

inline constexpr const char* kToolkitVersion = SEGEVAL_VERSION;
inline constexpr int kReportSchemaVersion = 1;

}  // namespace segeval
