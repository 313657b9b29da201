#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tagsight::cli {

enum ExitCode : int { ok = 0, validation = 1, data = 2, internal = 3 };

// Runs one command line (without the program name). Messages go to `err`,
// short summaries to `out`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tagsight::cli
