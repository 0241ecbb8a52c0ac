#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stillness {

/// Runs the command-line tool. args excludes the program name.
/// Returns 0 on success; on failure writes a single diagnostic line to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stillness
