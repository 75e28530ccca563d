#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wander {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitGeneration = 2, kExitIo = 3 };

/// Entry point of the command-line tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wander
