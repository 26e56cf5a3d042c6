#pragma once

// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace copguide::cli {

inline constexpr std::string_view kCliSchema = "copguide-cli/1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace copguide::cli
