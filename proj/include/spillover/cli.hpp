#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spill::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Entry point behind the `spillover` executable. Returns the process exit
/// status: 0 on success, 1 on a runtime failure, 2 on a usage error. Failures
/// print a single "error: ..." line to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace spill::cli
