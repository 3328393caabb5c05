#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mechlab {

enum ExitCode { kExitOk = 0, kExitInequality = 1, kExitUsage = 2, kExitValidation = 3, kExitNumerical = 4 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mechlab
