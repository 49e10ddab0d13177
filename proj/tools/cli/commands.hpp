#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wqkd::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitIoError = 3;
inline constexpr int kExitNumericalError = 4;

// Runs one wqkd invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wqkd::cli
