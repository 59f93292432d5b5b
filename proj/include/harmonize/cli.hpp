#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harmonize::cli {

/// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;       // validation, data, or verification failure
inline constexpr int kExitEnvironment = 2;  // I/O, parse, or usage failure

/// Runs the `harmonize` command line. `args` excludes the program name.
/// Reads stdin only for `--input -`. Never throws.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace harmonize::cli
