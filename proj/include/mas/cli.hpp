#pragma once

// Command-line front end. Exit codes: 0 pass, 1 verification failure,
// 2 input error.

#include <iosfwd>
#include <string>
#include <vector>

namespace mas::cli {

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mas::cli
