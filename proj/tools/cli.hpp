#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace quadloco::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitIo = 4,
};

/// Runs one command line (without the program name). Results go to `out`, error JSON to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const std::vector<std::string>& subcommands();

}  // namespace quadloco::cli
