#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idsforge::cli {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 on success, 2 on bad input, 3 on an internal invariant failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a flat "key = value" config file. Blank lines and lines starting
/// with '#' are ignored; keys are long flag names without the dashes.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

}  // namespace idsforge::cli
