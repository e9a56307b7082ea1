#pragma once

// sgsteer command line: pdf, measure, boxes, protocol, validate.

#include <iosfwd>

namespace sgsteer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "SGSTEER_OUTPUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgsteer::cli
