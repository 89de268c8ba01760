#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridcast::cli {

inline constexpr const char* kToolVersion = "0.3.0";

// Parses and runs one invocation; returns the process exit code. Everything
// user-facing goes to out/err so tests can drive the CLI in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridcast::cli
