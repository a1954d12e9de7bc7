#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace idr::cli {

enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kIoError = 2,
};

// Runs the idr_bench command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace idr::cli
