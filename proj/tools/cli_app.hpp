#pragma once

#include <string>
#include <vector>

namespace surprise {

// Runs the surprise CLI.  Exit status: 0 success, 1 usage error, 2 data error.
int run_cli(int argc, const char* const* argv);

// Walks every subcommand and reports any registered option whose name is
// missing from that subcommand's rendered help text (expected: none).
std::vector<std::string> cli_help_gaps();

}  // namespace surprise
