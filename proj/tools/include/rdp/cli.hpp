#pragma once

#include <string>
#include <vector>

namespace rdp::cli {

// Entry point for the rdp tool. Subcommands: curves, spectrum, simulate,
// oracle. Returns 0 on success, 2 on argument errors, 1 on runtime errors.
int run(int argc, const char* const* argv);

// Same, for in-process callers; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace rdp::cli
